use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Powers of `i` raised to 0..4.
pub(crate) const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

pub const MAX_QUBITS: usize = 64;

/// A tensor product of single-qubit Paulis with a phase in {1, i, -1, -i}.
///
/// Stored in symplectic form: bit `q` of `x`/`z` holds the X/Z content of
/// the factor on qubit `q`, and a factor with both bits set is a literal
/// `Y` (not `XZ`). The operator is `i^phase * P_0 ⊗ P_1 ⊗ ...`.
///
/// The textual form lists qubit 0 first, optionally prefixed by a sign:
/// `"-iXIZ"` is `-i * X_0 Z_2` on three qubits.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self { n_qubits, x: 0, z: 0, phase: 0 }
    }

    /// Builds a string from sparse `(qubit, label)` factors.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::InvalidPauli(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let mut out = Self::identity(n_qubits);
        let mut seen = 0u64;
        for &(q, p) in factors {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if seen >> q & 1 == 1 {
                return Err(Error::RepeatedQubit(q));
            }
            seen |= 1 << q;
            let (xb, zb) = p.bits();
            out.x |= (xb as u64) << q;
            out.z |= (zb as u64) << q;
        }
        Ok(out)
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        Self::from_factors(n_qubits, &[(qubit, p)])
    }

    pub(crate) fn from_masks(n_qubits: usize, x: u64, z: u64, phase: u8) -> Self {
        Self { n_qubits, x, z, phase: phase & 3 }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Exponent `k` of the phase `i^k`.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn phase(&self) -> Complex64 {
        I_POW[self.phase as usize]
    }

    pub fn with_phase_exponent(mut self, k: u8) -> Self {
        self.phase = k & 3;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    /// Sign of a Hermitian string, or `None` when the phase is ±i.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn factors(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.get(q)).collect()
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| self.support_mask() >> q & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    /// Same factors, ignoring the phase.
    pub fn same_factors(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Whether every qubit is acted on by the same label or the identity.
    pub fn qubitwise_commutes(&self, other: &Self) -> bool {
        let both = self.support_mask() & other.support_mask();
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    pub fn dagger(&self) -> Self {
        let mut out = self.clone();
        out.phase = (4 - self.phase) & 3;
        out
    }

    /// Number of `Y` factors.
    pub(crate) fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Action on a computational basis state: `P|b> = coeff(b) |b ^ x>`.
    #[inline]
    pub fn basis_coefficient(&self, b: usize) -> Complex64 {
        let k = (self.phase as u32 + self.y_count()) & 3;
        let c = I_POW[k as usize];
        if (b as u64 & self.z).count_ones() % 2 == 1 {
            -c
        } else {
            c
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        let mut k = self.phase as u32 + other.phase as u32;
        let mut active = self.support_mask() & other.support_mask();
        while active != 0 {
            let q = active.trailing_zeros();
            active &= active - 1;
            k += local_phase(
                self.x >> q & 1 == 1,
                self.z >> q & 1 == 1,
                other.x >> q & 1 == 1,
                other.z >> q & 1 == 1,
            );
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (k & 3) as u8,
        })
    }

    /// Dense `2^n x 2^n` matrix in row-major order. Intended for tests.
    pub fn dense(&self) -> Vec<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for b in 0..dim {
            m[b ^ self.x as usize][b] = self.basis_coefficient(b);
        }
        m
    }
}

/// Exponent `g` with `σ_a σ_b = i^g σ_{a·b}` for single-qubit factors.
fn local_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> u32 {
    let a = Pauli::from_bits(x1, z1);
    let b = Pauli::from_bits(x2, z2);
    use Pauli::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    /// Panics on a register-size mismatch; use [`PauliString::checked_mul`]
    /// to get an error instead.
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.checked_mul(rhs).expect("Pauli register sizes differ")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).label())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix("+i").or_else(|| s.strip_prefix('i')) {
            (1, rest)
        } else {
            (0, s.strip_prefix('+').unwrap_or(s))
        };
        let mut factors = Vec::new();
        for (q, c) in body.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::InvalidPauli(format!("unexpected character {other:?}"))),
            };
            factors.push((q, p));
        }
        Ok(Self::from_factors(factors.len(), &factors)?.with_phase_exponent(phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
