//! Circuit frontend: OpenQASM parsing and synthesis into FT workloads.
//!
//! `layerize_gbc` packs a Clifford+T circuit into parallel gate layers (ASAP);
//! `synthesize_pbc` rewrites it into a sequence of Pauli-product rotations by
//! commuting every Clifford past the non-Clifford gates with a tableau.

mod qasm;
mod tableau;

pub use qasm::parse_qasm;
pub use tableau::CliffordTableau;

use crate::error::{Error, Result};
use crate::workload::{
    CliffordGate, GateLayer, Layers, PauliString, PpmLayer, Sign, Workload,
};

/// One gate of a Clifford+T circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    MeasureZ(usize),
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::T(q)
            | Gate::Tdg(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::MeasureZ(q) => (q, None),
            Gate::Cx(a, b) | Gate::Cz(a, b) => (a, Some(b)),
        }
    }

    /// The Clifford part of the gate, if it is one.
    pub fn as_clifford(&self) -> Option<CliffordGate> {
        match *self {
            Gate::H(q) => Some(CliffordGate::H(q)),
            Gate::S(q) => Some(CliffordGate::S(q)),
            Gate::Sdg(q) => Some(CliffordGate::Sdg(q)),
            Gate::X(q) => Some(CliffordGate::X(q)),
            Gate::Y(q) => Some(CliffordGate::Y(q)),
            Gate::Z(q) => Some(CliffordGate::Z(q)),
            Gate::Cx(a, b) => Some(CliffordGate::Cx(a, b)),
            Gate::Cz(a, b) => Some(CliffordGate::Cz(a, b)),
            Gate::T(_) | Gate::Tdg(_) | Gate::MeasureZ(_) => None,
        }
    }
}

/// A Clifford+T circuit in program order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<Gate>) -> Result<Self> {
        for op in &ops {
            let (a, b) = op.qubits();
            let hi = b.map_or(a, |b| a.max(b));
            if hi >= n_qubits {
                return Err(Error::IndexOutOfRange { index: hi, bound: n_qubits });
            }
            if b == Some(a) {
                return Err(Error::Format(format!("{op:?} has equal operands")));
            }
        }
        Ok(Circuit { n_qubits, ops })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Gate] {
        &self.ops
    }

    /// Number of T and Tdg gates.
    pub fn t_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|g| matches!(g, Gate::T(_) | Gate::Tdg(_)))
            .count()
    }
}

/// Greedy ASAP layering: each gate lands in the earliest layer where none of
/// its operands are already used and all gates it depends on sit strictly
/// earlier. Terminal readout is not costed, so MeasureZ ops are dropped.
pub fn layerize_gbc(circuit: &Circuit, name: &str) -> Result<Workload> {
    let n = circuit.n_qubits();
    let mut next_free = vec![0usize; n];
    let mut cliffords: Vec<Vec<CliffordGate>> = Vec::new();
    let mut t_gates: Vec<Vec<(usize, bool)>> = Vec::new();

    for op in circuit.ops() {
        if matches!(op, Gate::MeasureZ(_)) {
            continue;
        }
        let (a, b) = op.qubits();
        let layer = match b {
            Some(b) => next_free[a].max(next_free[b]),
            None => next_free[a],
        };
        while cliffords.len() <= layer {
            cliffords.push(Vec::new());
            t_gates.push(Vec::new());
        }
        match op {
            Gate::T(q) => t_gates[layer].push((*q, false)),
            Gate::Tdg(q) => t_gates[layer].push((*q, true)),
            other => cliffords[layer].push(other.as_clifford().expect("clifford op")),
        }
        next_free[a] = layer + 1;
        if let Some(b) = b {
            next_free[b] = layer + 1;
        }
    }

    let layers: Result<Vec<GateLayer>> = cliffords
        .into_iter()
        .zip(t_gates)
        .map(|(c, t)| GateLayer::new(c, t))
        .collect();
    Workload::new(name, n, Layers::Gbc(layers?))
}

/// Rewrites the circuit as sequential Pauli-product layers.
///
/// Sweeping left to right, Clifford gates fold into a frame tableau; each
/// T/Tdg on qubit q emits a magic-consuming pi/8 layer whose axis is the
/// frame's image of Z_q. After the sweep, one magic-free layer per measured
/// qubit realizes terminal readout under the final frame.
pub fn synthesize_pbc(circuit: &Circuit, name: &str) -> Result<Workload> {
    let n = circuit.n_qubits();
    let mut frame = CliffordTableau::identity(n);
    let mut layers: Vec<PpmLayer> = Vec::new();
    let mut measured: Vec<usize> = Vec::new();

    for op in circuit.ops() {
        if let Some(cg) = op.as_clifford() {
            frame.prepend_adjoint(cg);
            continue;
        }
        match *op {
            Gate::T(q) | Gate::Tdg(q) => {
                let dagger = matches!(op, Gate::Tdg(_));
                let (rotation, sign) = frame.conjugate_z(q)?;
                let sign = if dagger { sign.flip() } else { sign };
                layers.push(PpmLayer::new(rotation, true, sign)?);
            }
            Gate::MeasureZ(q) => {
                if !measured.contains(&q) {
                    measured.push(q);
                }
            }
            _ => unreachable!(),
        }
    }

    for q in measured {
        let (rotation, sign) = frame.conjugate_z(q)?;
        layers.push(PpmLayer::new(rotation, false, sign)?);
    }

    Workload::new(name, n, Layers::Pbc(layers))
}

/// Returns C p C-dagger for the given tableau and sparse Pauli.
pub fn conjugate_pauli(
    tableau: &CliffordTableau,
    p: &PauliString,
) -> Result<(PauliString, Sign)> {
    tableau.conjugate(p)
}
