use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::PauliString;

/// One Hamiltonian term `coefficient * pauli`; the string carries phase +1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub pauli: PauliString,
}

/// A Hermitian operator as an ordered sum of real-weighted Pauli strings.
/// The order is the Trotter order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerms {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl HamiltonianTerms {
    pub fn new(n_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.pauli.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch { expected: n_qubits, got: t.pauli.n_qubits() });
            }
            if t.pauli.phase_exponent() != 0 {
                return Err(Error::UnsupportedTerm(format!(
                    "{} must carry phase +1 with the sign in the coefficient",
                    t.pauli
                )));
            }
            if !t.coefficient.is_finite() {
                return Err(Error::UnsupportedTerm(format!("non-finite coefficient on {}", t.pauli)));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every string has an even number of `Y` factors, so the
    /// matrix is real in the computational basis.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| (t.pauli.x_mask() & t.pauli.z_mask()).count_ones() % 2 == 0)
    }

    /// `H|ψ>` without forming the matrix.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for t in &self.terms {
            let x = t.pauli.x_mask() as usize;
            for (b, a) in psi.iter().enumerate() {
                out[b ^ x] += t.coefficient * t.pauli.basis_coefficient(b) * a;
            }
        }
        out
    }

    /// Dense row-major matrix, `dim x dim`.
    pub fn dense(&self) -> nalgebra::DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let x = t.pauli.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += t.coefficient * t.pauli.basis_coefficient(b);
            }
        }
        m
    }
}

/// Complex linear combination of phase-free Pauli strings, used to expand
/// fermionic operators.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn from_pauli(c: Complex64, p: PauliString) -> Self {
        let mut s = Self::zero(p.n_qubits());
        s.push(c, p);
        s
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    fn push(&mut self, c: Complex64, p: PauliString) {
        let c = c * p.phase();
        let p = p.with_phase_exponent(0);
        if let Some(slot) = self.terms.iter_mut().find(|(_, q)| *q == p) {
            slot.0 += c;
        } else {
            self.terms.push((c, p));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, p) in &other.terms {
            out.push(*c, p.clone());
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n_qubits: self.n_qubits, terms: self.terms.iter().map(|(c, p)| (c * s, p.clone())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_qubits);
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                out.push(a * b, p * q);
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        Self { n_qubits: self.n_qubits, terms: self.terms.iter().map(|(c, p)| (c.conj(), p.clone())).collect() }
    }

    /// Drops coefficients below `tol`.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|(c, _)| c.norm() > tol);
        self
    }

    /// Real-coefficient terms of a Hermitian sum.
    pub fn into_real_terms(self, tol: f64) -> Result<Vec<Term>> {
        self.pruned(tol)
            .terms
            .into_iter()
            .map(|(c, p)| {
                if c.im.abs() > tol {
                    return Err(Error::UnsupportedTerm(format!("complex coefficient {c} on {p}")));
                }
                Ok(Term { coefficient: c.re, pauli: p })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_is_hermitian() {
        let terms = HamiltonianTerms::new(
            2,
            vec![
                Term { coefficient: 0.5, pauli: "XY".parse().unwrap() },
                Term { coefficient: -1.0, pauli: "ZI".parse().unwrap() },
            ],
        )
        .unwrap();
        let m = terms.dense();
        assert!((&m - m.adjoint()).norm() < 1e-12);
        assert!(!terms.is_real());
    }

    #[test]
    fn rejects_phased_terms() {
        let t = Term { coefficient: 1.0, pauli: "-XX".parse().unwrap() };
        assert!(HamiltonianTerms::new(2, vec![t]).is_err());
    }
}
