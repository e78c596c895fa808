//! Brute-force statevector oracle shared by integration tests.
//!
//! Builds dense unitaries for small circuits directly from gate definitions,
//! with no tableau algebra involved, so synthesized rotation sequences can be
//! checked for unitary equivalence up to global phase.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

use hqa_core::frontend::{Circuit, Gate};
use hqa_core::workload::{PauliAxis, PauliString, Sign};

pub type Mat = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(dim: usize) -> Mat {
    let mut m = vec![vec![ZERO; dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let dim = a.len();
    let mut out = vec![vec![ZERO; dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..dim {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn mat1(gate: &Gate) -> [[Complex64; 2]; 2] {
    let f = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::i();
    match gate {
        Gate::H(_) => [[ONE * f, ONE * f], [ONE * f, -ONE * f]],
        Gate::S(_) => [[ONE, ZERO], [ZERO, i]],
        Gate::Sdg(_) => [[ONE, ZERO], [ZERO, -i]],
        Gate::T(_) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        Gate::Tdg(_) => {
            [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]]
        }
        Gate::X(_) => [[ZERO, ONE], [ONE, ZERO]],
        Gate::Y(_) => [[ZERO, -i], [i, ZERO]],
        Gate::Z(_) => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("not a one-qubit unitary: {gate:?}"),
    }
}

/// Embeds a one-qubit matrix on qubit q (qubit j is bit j of the index).
fn embed1(u: [[Complex64; 2]; 2], q: usize, n: usize) -> Mat {
    let dim = 1 << n;
    let mut m = vec![vec![ZERO; dim]; dim];
    for col in 0..dim {
        let cq = (col >> q) & 1;
        for rq in 0..2 {
            let row = (col & !(1 << q)) | (rq << q);
            m[row][col] = u[rq][cq];
        }
    }
    m
}

/// Embeds CX/CZ with the given control and target bits.
fn embed2(gate: &Gate, n: usize) -> Mat {
    let dim = 1 << n;
    let mut m = vec![vec![ZERO; dim]; dim];
    match *gate {
        Gate::Cx(c, t) => {
            for col in 0..dim {
                let row = if (col >> c) & 1 == 1 { col ^ (1 << t) } else { col };
                m[row][col] = ONE;
            }
        }
        Gate::Cz(c, t) => {
            for col in 0..dim {
                let sign = if (col >> c) & 1 == 1 && (col >> t) & 1 == 1 { -ONE } else { ONE };
                m[col][col] = sign;
            }
        }
        _ => panic!("not a two-qubit gate: {gate:?}"),
    }
    m
}

pub fn gate_matrix(gate: &Gate, n: usize) -> Mat {
    match gate {
        Gate::Cx(..) | Gate::Cz(..) => embed2(gate, n),
        Gate::MeasureZ(_) => panic!("measurement has no unitary"),
        one_qubit => {
            let (q, _) = one_qubit.qubits();
            embed1(mat1(one_qubit), q, n)
        }
    }
}

/// Full circuit unitary (measurements must be absent).
pub fn circuit_unitary(circuit: &Circuit) -> Mat {
    let n = circuit.n_qubits();
    let mut u = identity(1 << n);
    for op in circuit.ops() {
        u = matmul(&gate_matrix(op, n), &u);
    }
    u
}

/// Product of only the circuit's Clifford gates, in program order.
pub fn clifford_unitary(circuit: &Circuit) -> Mat {
    let n = circuit.n_qubits();
    let mut u = identity(1 << n);
    for op in circuit.ops() {
        if op.as_clifford().is_some() {
            u = matmul(&gate_matrix(op, n), &u);
        }
    }
    u
}

pub fn pauli_matrix(p: &PauliString, n: usize) -> Mat {
    let mut u = identity(1 << n);
    for (q, axis) in p.iter() {
        let g = match axis {
            PauliAxis::X => Gate::X(q),
            PauliAxis::Y => Gate::Y(q),
            PauliAxis::Z => Gate::Z(q),
        };
        u = matmul(&gate_matrix(&g, n), &u);
    }
    u
}

/// Rotation exp(-i pi/8 * sign * P) = cos(pi/8) I - i sin(pi/8) sign P.
pub fn pi8_rotation(p: &PauliString, sign: Sign, n: usize) -> Mat {
    let dim = 1 << n;
    let pm = pauli_matrix(p, n);
    let angle = std::f64::consts::PI / 8.0;
    let cos = Complex64::new(angle.cos(), 0.0);
    let msin = Complex64::new(0.0, -angle.sin() * sign.as_f64());
    let mut out = vec![vec![ZERO; dim]; dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut v = msin * pm[r][c];
            if r == c {
                v += cos;
            }
            out[r][c] = v;
        }
    }
    out
}

/// True when b = phase * a for a unit-modulus global phase.
pub fn equal_up_to_phase(a: &Mat, b: &Mat, tol: f64) -> bool {
    let dim = a.len();
    let mut best = (0, 0);
    let mut best_norm = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let n = a[r][c].norm();
            if n > best_norm {
                best_norm = n;
                best = (r, c);
            }
        }
    }
    if best_norm < tol {
        return false;
    }
    let phase = b[best.0][best.1] / a[best.0][best.1];
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    for r in 0..dim {
        for c in 0..dim {
            if (b[r][c] - phase * a[r][c]).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Random Clifford+T circuit without measurements.
pub fn random_circuit(rng: &mut StdRng, max_qubits: usize, max_gates: usize) -> Circuit {
    let n = rng.gen_range(1..=max_qubits);
    let len = rng.gen_range(1..=max_gates);
    let ops: Vec<Gate> = (0..len)
        .map(|_| {
            let q = rng.gen_range(0..n);
            let two_qubit_ok = n >= 2;
            match rng.gen_range(0..10) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                2 => Gate::Sdg(q),
                3 => Gate::X(q),
                4 => Gate::Y(q),
                5 => Gate::Z(q),
                6 => Gate::T(q),
                7 => Gate::Tdg(q),
                k => {
                    if two_qubit_ok {
                        let mut r = rng.gen_range(0..n - 1);
                        if r >= q {
                            r += 1;
                        }
                        if k == 8 {
                            Gate::Cx(q, r)
                        } else {
                            Gate::Cz(q, r)
                        }
                    } else {
                        Gate::T(q)
                    }
                }
            }
        })
        .collect();
    Circuit::new(n, ops).unwrap()
}
