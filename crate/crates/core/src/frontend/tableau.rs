//! Symplectic tableau tracking how a Clifford circuit conjugates Paulis.
//!
//! The tableau stores, for each qubit j, the images of the generators X_j and
//! Z_j under conjugation by the represented Clifford C (each image is a signed
//! Pauli string). `append` composes a gate after C, `prepend` before it; both
//! preserve the symplectic condition, which is re-checked on the touched
//! qubits in debug builds.

use crate::error::{Error, Result};
use crate::workload::{CliffordGate, PauliAxis, PauliString, Sign};

/// Dense single-qubit letter, identity included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn from_axis(a: PauliAxis) -> Letter {
        match a {
            PauliAxis::X => Letter::X,
            PauliAxis::Y => Letter::Y,
            PauliAxis::Z => Letter::Z,
        }
    }

    fn to_axis(self) -> Option<PauliAxis> {
        match self {
            Letter::I => None,
            Letter::X => Some(PauliAxis::X),
            Letter::Y => Some(PauliAxis::Y),
            Letter::Z => Some(PauliAxis::Z),
        }
    }

    /// Letter product with the power of i it contributes: a * b = i^phase * letter.
    fn mul(self, other: Letter) -> (Letter, u8) {
        use Letter::*;
        match (self, other) {
            (I, b) => (b, 0),
            (a, I) => (a, 0),
            (X, X) | (Y, Y) | (Z, Z) => (I, 0),
            (X, Y) => (Z, 1),
            (Y, X) => (Z, 3),
            (Y, Z) => (X, 1),
            (Z, Y) => (X, 3),
            (Z, X) => (Y, 1),
            (X, Z) => (Y, 3),
        }
    }
}

/// Hermitian signed Pauli string over a fixed register, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SignedPauli {
    letters: Vec<Letter>,
    sign: Sign,
}

impl SignedPauli {
    fn identity(n: usize) -> Self {
        SignedPauli { letters: vec![Letter::I; n], sign: Sign::Plus }
    }

    fn basis(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.letters[q] = letter;
        p
    }

    fn to_sparse(&self) -> (PauliString, Sign) {
        let pairs = self
            .letters
            .iter()
            .enumerate()
            .filter_map(|(q, l)| l.to_axis().map(|a| (q, a)));
        (PauliString::from_pairs(pairs), self.sign)
    }

    fn anticommutes(&self, other: &SignedPauli) -> bool {
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Letter::I && **b != Letter::I && a != b)
            .count();
        clashes % 2 == 1
    }
}

/// Accumulator for products of signed Paulis; tracks i^phase mod 4.
struct Product {
    letters: Vec<Letter>,
    phase: u8,
}

impl Product {
    fn identity(n: usize) -> Self {
        Product { letters: vec![Letter::I; n], phase: 0 }
    }

    fn mul_by(&mut self, p: &SignedPauli) {
        if p.sign == Sign::Minus {
            self.phase = (self.phase + 2) % 4;
        }
        for (acc, &l) in self.letters.iter_mut().zip(&p.letters) {
            let (out, ph) = acc.mul(l);
            *acc = out;
            self.phase = (self.phase + ph) % 4;
        }
    }

    fn finish(self) -> SignedPauli {
        debug_assert!(self.phase % 2 == 0, "non-Hermitian Pauli product");
        let sign = if self.phase % 4 == 2 { Sign::Minus } else { Sign::Plus };
        SignedPauli { letters: self.letters, sign }
    }
}

/// One basis factor of a conjugated generator: (qubit, letter, leading sign).
type BasisImage = (Sign, Vec<(usize, Letter)>);

/// How `g` conjugates the generator `letter` on the given operand; expressed
/// as a signed product of basis letters.
fn conj_basis(g: CliffordGate, q: usize, letter: Letter) -> BasisImage {
    debug_assert!(letter == Letter::X || letter == Letter::Z);
    let x = letter == Letter::X;
    match g {
        CliffordGate::H(_) => {
            (Sign::Plus, vec![(q, if x { Letter::Z } else { Letter::X })])
        }
        CliffordGate::S(_) => {
            if x {
                (Sign::Plus, vec![(q, Letter::Y)])
            } else {
                (Sign::Plus, vec![(q, Letter::Z)])
            }
        }
        CliffordGate::Sdg(_) => {
            if x {
                (Sign::Minus, vec![(q, Letter::Y)])
            } else {
                (Sign::Plus, vec![(q, Letter::Z)])
            }
        }
        CliffordGate::X(_) => (if x { Sign::Plus } else { Sign::Minus }, vec![(q, letter)]),
        CliffordGate::Y(_) => (Sign::Minus, vec![(q, letter)]),
        CliffordGate::Z(_) => (if x { Sign::Minus } else { Sign::Plus }, vec![(q, letter)]),
        CliffordGate::Cx(c, t) => {
            if x {
                if q == c {
                    (Sign::Plus, vec![(c, Letter::X), (t, Letter::X)])
                } else {
                    (Sign::Plus, vec![(t, Letter::X)])
                }
            } else if q == c {
                (Sign::Plus, vec![(c, Letter::Z)])
            } else {
                (Sign::Plus, vec![(c, Letter::Z), (t, Letter::Z)])
            }
        }
        CliffordGate::Cz(c, t) => {
            let other = if q == c { t } else { c };
            if x {
                (Sign::Plus, vec![(q, Letter::X), (other, Letter::Z)])
            } else {
                (Sign::Plus, vec![(q, Letter::Z)])
            }
        }
    }
}

fn adjoint(g: CliffordGate) -> CliffordGate {
    match g {
        CliffordGate::S(q) => CliffordGate::Sdg(q),
        CliffordGate::Sdg(q) => CliffordGate::S(q),
        other => other,
    }
}

/// Symplectic representation of an accumulated Clifford action.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<SignedPauli>,
    z_images: Vec<SignedPauli>,
}

impl CliffordTableau {
    /// Identity tableau: X_j -> X_j, Z_j -> Z_j with plus signs.
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            n,
            x_images: (0..n).map(|q| SignedPauli::basis(n, q, Letter::X)).collect(),
            z_images: (0..n).map(|q| SignedPauli::basis(n, q, Letter::Z)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Evaluates the image of a signed product of basis letters under the
    /// tableau's conjugation map.
    fn eval(&self, sign: Sign, factors: &[(usize, Letter)]) -> SignedPauli {
        let mut acc = Product::identity(self.n);
        if sign == Sign::Minus {
            acc.phase = 2;
        }
        for &(q, letter) in factors {
            match letter {
                Letter::I => {}
                Letter::X => acc.mul_by(&self.x_images[q]),
                Letter::Z => acc.mul_by(&self.z_images[q]),
                Letter::Y => {
                    // Y = i X Z
                    acc.phase = (acc.phase + 1) % 4;
                    acc.mul_by(&self.x_images[q]);
                    acc.mul_by(&self.z_images[q]);
                }
            }
        }
        acc.finish()
    }

    fn operands(g: CliffordGate) -> Vec<usize> {
        let (a, b) = g.qubits();
        match b {
            Some(b) => vec![a, b],
            None => vec![a],
        }
    }

    fn check_operands(&self, g: CliffordGate) {
        for q in Self::operands(g) {
            assert!(q < self.n, "gate operand {q} out of range for tableau of {} qubits", self.n);
        }
    }

    /// Composes `g` after the represented Clifford (C := g C).
    pub fn append(&mut self, g: CliffordGate) {
        self.check_operands(g);
        for img in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            apply_conj_in_place(img, g);
        }
        debug_assert!(self.check_symplectic_around(&Self::operands(g)));
    }

    /// Composes `g` before the represented Clifford (C := C g).
    pub fn prepend(&mut self, g: CliffordGate) {
        self.check_operands(g);
        let ops = Self::operands(g);
        let mut new_x = Vec::with_capacity(ops.len());
        let mut new_z = Vec::with_capacity(ops.len());
        for &q in &ops {
            let (sx, fx) = conj_basis(g, q, Letter::X);
            new_x.push(self.eval(sx, &fx));
            let (sz, fz) = conj_basis(g, q, Letter::Z);
            new_z.push(self.eval(sz, &fz));
        }
        for (i, &q) in ops.iter().enumerate() {
            self.x_images[q] = new_x[i].clone();
            self.z_images[q] = new_z[i].clone();
        }
        debug_assert!(self.check_symplectic_around(&ops));
    }

    /// Composes the gate's inverse before the represented Clifford.
    pub fn prepend_adjoint(&mut self, g: CliffordGate) {
        self.prepend(adjoint(g));
    }

    /// Returns C p C-dagger for a sparse Pauli string.
    pub fn conjugate(&self, p: &PauliString) -> Result<(PauliString, Sign)> {
        if let Some(max) = p.max_index() {
            if max >= self.n {
                return Err(Error::IndexOutOfRange { index: max, bound: self.n });
            }
        }
        let factors: Vec<(usize, Letter)> =
            p.iter().map(|(q, a)| (q, Letter::from_axis(a))).collect();
        Ok(self.eval(Sign::Plus, &factors).to_sparse())
    }

    /// Image of the generator Z_q.
    pub fn conjugate_z(&self, q: usize) -> Result<(PauliString, Sign)> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, bound: self.n });
        }
        Ok(self.z_images[q].to_sparse())
    }

    /// Image of the generator X_q.
    pub fn conjugate_x(&self, q: usize) -> Result<(PauliString, Sign)> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, bound: self.n });
        }
        Ok(self.x_images[q].to_sparse())
    }

    /// Full symplectic condition: X_j/Z_j images anticommute pairwise on the
    /// same qubit and commute across different qubits.
    pub fn is_symplectic(&self) -> bool {
        let all: Vec<usize> = (0..self.n).collect();
        self.check_symplectic_around(&all)
    }

    /// Checks the symplectic condition for the given qubits against all
    /// generators. O(|qs| * n) string comparisons.
    fn check_symplectic_around(&self, qs: &[usize]) -> bool {
        for &q in qs {
            if !self.x_images[q].anticommutes(&self.z_images[q]) {
                return false;
            }
            for j in 0..self.n {
                if j == q {
                    continue;
                }
                if self.x_images[q].anticommutes(&self.x_images[j])
                    || self.x_images[q].anticommutes(&self.z_images[j])
                    || self.z_images[q].anticommutes(&self.x_images[j])
                    || self.z_images[q].anticommutes(&self.z_images[j])
                {
                    return false;
                }
            }
        }
        true
    }
}

/// In-place conjugation of one stored image by a gate (acts only on the gate's
/// operand letters).
fn apply_conj_in_place(img: &mut SignedPauli, g: CliffordGate) {
    let mut flip = false;
    match g {
        CliffordGate::H(q) => {
            let l = &mut img.letters[q];
            match l {
                Letter::X => *l = Letter::Z,
                Letter::Z => *l = Letter::X,
                Letter::Y => flip = true,
                Letter::I => {}
            }
        }
        CliffordGate::S(q) => {
            let l = &mut img.letters[q];
            match l {
                Letter::X => *l = Letter::Y,
                Letter::Y => {
                    *l = Letter::X;
                    flip = true;
                }
                _ => {}
            }
        }
        CliffordGate::Sdg(q) => {
            let l = &mut img.letters[q];
            match l {
                Letter::X => {
                    *l = Letter::Y;
                    flip = true;
                }
                Letter::Y => *l = Letter::X,
                _ => {}
            }
        }
        CliffordGate::X(q) => flip = matches!(img.letters[q], Letter::Y | Letter::Z),
        CliffordGate::Y(q) => flip = matches!(img.letters[q], Letter::X | Letter::Z),
        CliffordGate::Z(q) => flip = matches!(img.letters[q], Letter::X | Letter::Y),
        CliffordGate::Cx(c, t) | CliffordGate::Cz(c, t) => {
            let (a, b) = (img.letters[c], img.letters[t]);
            let mut acc = Product::identity(2);
            if img.sign == Sign::Minus {
                acc.phase = 2;
            }
            for (q, letter) in [(c, a), (t, b)] {
                match letter {
                    Letter::I => {}
                    Letter::X => acc.mul_by(&two_qubit_image(g, q, c, t, Letter::X)),
                    Letter::Z => acc.mul_by(&two_qubit_image(g, q, c, t, Letter::Z)),
                    Letter::Y => {
                        acc.phase = (acc.phase + 1) % 4;
                        acc.mul_by(&two_qubit_image(g, q, c, t, Letter::X));
                        acc.mul_by(&two_qubit_image(g, q, c, t, Letter::Z));
                    }
                }
            }
            let out = acc.finish();
            img.letters[c] = out.letters[0];
            img.letters[t] = out.letters[1];
            img.sign = out.sign;
            return;
        }
    }
    if flip {
        img.sign = img.sign.flip();
    }
}

/// Image of a basis letter under a two-qubit gate, laid out on [c, t].
fn two_qubit_image(g: CliffordGate, q: usize, c: usize, t: usize, letter: Letter) -> SignedPauli {
    let (sign, factors) = conj_basis(g, q, letter);
    let mut out = SignedPauli::identity(2);
    out.sign = sign;
    for (pos, l) in factors {
        let idx = if pos == c { 0 } else { 1 };
        debug_assert!(pos == c || pos == t);
        out.letters[idx] = l;
    }
    out
}
