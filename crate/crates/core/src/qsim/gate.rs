use num_complex::Complex64;

use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A gate acting on a statevector.
///
/// `PauliRotation` applies `exp(-i angle/2 P)`. Two-qubit blocks use the
/// local basis index `2*b(qubits[0]) + b(qubits[1])`, so a block built as
/// `kron(A, B)` applies `A` to `qubits[0]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    PauliRotation { generator: PauliString, angle: f64 },
    Cnot { control: usize, target: usize },
    Unitary1(Block1),
    Unitary2(Block2),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block1 {
    pub qubit: usize,
    pub matrix: [[Complex64; 2]; 2],
}

/// A fused two-qubit unitary, remembering the rotations it was built from
/// so the compiler can pick a native decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Block2 {
    qubits: [usize; 2],
    matrix: [[Complex64; 4]; 4],
    rotations: Vec<(PauliString, f64)>,
    excitation_preserving: bool,
}

impl Block2 {
    pub fn from_matrix(qubits: [usize; 2], matrix: [[Complex64; 4]; 4]) -> Self {
        Self::finish(qubits, matrix, Vec::new())
    }

    /// Product `R_k ... R_1` of rotations `exp(-i θ/2 P)`, each `P`
    /// supported inside `qubits`.
    pub fn from_rotations(qubits: [usize; 2], rotations: Vec<(PauliString, f64)>) -> Result<Self> {
        if qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        let allowed = (1u64 << qubits[0]) | (1u64 << qubits[1]);
        let mut m = identity4();
        for (p, theta) in &rotations {
            if p.support_mask() & !allowed != 0 {
                return Err(Error::UnsupportedTerm(format!("{p} is not supported on {qubits:?}")));
            }
            let sign = p.sign().ok_or(Error::NonRealPhase)?;
            let local = kron(&pauli_matrix(p.get(qubits[0])), &pauli_matrix(p.get(qubits[1])));
            let (s, c) = (theta / 2.0).sin_cos();
            let mut r = [[ZERO; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    r[i][j] = Complex64::new(0.0, -s * sign) * local[i][j];
                }
                r[i][i] += c;
            }
            m = matmul4(&r, &m);
        }
        Ok(Self::finish(qubits, m, rotations))
    }

    fn finish(qubits: [usize; 2], mut matrix: [[Complex64; 4]; 4], rotations: Vec<(PauliString, f64)>) -> Self {
        let allowed = |i: usize, j: usize| i == j || (i == 1 && j == 2) || (i == 2 && j == 1);
        let preserving = (0..16).all(|k| allowed(k / 4, k % 4) || matrix[k / 4][k % 4].norm() < 1e-13);
        if preserving {
            for k in 0..16 {
                if !allowed(k / 4, k % 4) {
                    matrix[k / 4][k % 4] = ZERO;
                }
            }
        }
        Self { qubits, matrix, rotations, excitation_preserving: preserving }
    }

    pub fn qubits(&self) -> [usize; 2] {
        self.qubits
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.matrix
    }

    pub fn rotations(&self) -> &[(PauliString, f64)] {
        &self.rotations
    }

    /// True when the block only mixes |01> with |10>.
    pub fn is_excitation_preserving(&self) -> bool {
        self.excitation_preserving
    }
}

impl Gate {
    pub fn rotation(generator: PauliString, angle: f64) -> Result<Self> {
        if !generator.is_hermitian() {
            return Err(Error::NonRealPhase);
        }
        Ok(Gate::PauliRotation { generator, angle })
    }

    pub fn rx(n_qubits: usize, q: usize, angle: f64) -> Result<Self> {
        Self::rotation(PauliString::single(n_qubits, q, Pauli::X)?, angle)
    }

    pub fn ry(n_qubits: usize, q: usize, angle: f64) -> Result<Self> {
        Self::rotation(PauliString::single(n_qubits, q, Pauli::Y)?, angle)
    }

    pub fn rz(n_qubits: usize, q: usize, angle: f64) -> Result<Self> {
        Self::rotation(PauliString::single(n_qubits, q, Pauli::Z)?, angle)
    }

    pub fn hadamard(q: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Gate::Unitary1(Block1 {
            qubit: q,
            matrix: [[Complex64::new(h, 0.0), Complex64::new(h, 0.0)], [
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ]],
        })
    }

    pub fn s_dagger(q: usize) -> Self {
        Gate::Unitary1(Block1 { qubit: q, matrix: [[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]] })
    }

    pub fn s(q: usize) -> Self {
        Gate::Unitary1(Block1 { qubit: q, matrix: [[ONE, ZERO], [ZERO, Complex64::new(0.0, 1.0)]] })
    }

    pub fn pauli_x(q: usize) -> Self {
        Gate::Unitary1(Block1 { qubit: q, matrix: [[ZERO, ONE], [ONE, ZERO]] })
    }

    pub fn support(&self) -> Vec<usize> {
        match self {
            Gate::PauliRotation { generator, .. } => generator.support(),
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Unitary1(b) => vec![b.qubit],
            Gate::Unitary2(b) => b.qubits.to_vec(),
        }
    }

    /// Qubit pair of a gate that is a genuine two-qubit gate.
    pub fn two_qubit_pair(&self) -> Option<[usize; 2]> {
        match self {
            Gate::Cnot { control, target } => Some([*control, *target]),
            Gate::Unitary2(b) => Some(b.qubits),
            Gate::PauliRotation { generator, .. } if generator.weight() == 2 => {
                let s = generator.support();
                Some([s[0], s[1]])
            }
            _ => None,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Gate::PauliRotation { generator, .. } = self {
            if generator.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch { expected: n_qubits, got: generator.n_qubits() });
            }
            if !generator.is_hermitian() {
                return Err(Error::NonRealPhase);
            }
        }
        let support = self.support();
        for (i, &q) in support.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if support[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        Ok(())
    }
}

pub(crate) fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -i], [i, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

pub(crate) fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
        }
    }
    out
}

pub(crate) fn identity4() -> [[Complex64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub(crate) fn matmul4(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for j in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}
