use serde::{Deserialize, Serialize};

use super::terms::{HamiltonianTerms, Term};
use super::{chain_bonds, Boundary};
use crate::error::{Error, Result};
use crate::qsim::{Pauli, PauliString};

/// Uniform XYZ Heisenberg chain `Σ_r Σ_α J^α σ^α_r σ^α_{r+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainSpec {
    pub length: usize,
    #[serde(default = "unit_couplings")]
    pub couplings: [f64; 3],
    #[serde(default)]
    pub boundary: Boundary,
}

fn unit_couplings() -> [f64; 3] {
    [1.0; 3]
}

impl SpinChainSpec {
    pub fn new(length: usize, boundary: Boundary) -> Self {
        Self { length, couplings: unit_couplings(), boundary }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::InvalidModel(format!("spin chain needs length >= 2, got {}", self.length)));
        }
        if self.couplings.iter().any(|j| !j.is_finite()) {
            return Err(Error::InvalidModel("couplings must be finite".into()));
        }
        Ok(())
    }
}

/// Heisenberg terms in Trotter order: bonds with an even left site first,
/// then odd ones; each bond contributes XX, YY, ZZ.
pub fn build_heisenberg_terms(spec: &SpinChainSpec) -> Result<HamiltonianTerms> {
    spec.validate()?;
    let n = spec.length;
    let mut terms = Vec::with_capacity(3 * n);
    for (a, b) in chain_bonds(n, spec.boundary) {
        for (axis, &j) in [Pauli::X, Pauli::Y, Pauli::Z].iter().zip(&spec.couplings) {
            terms.push(Term { coefficient: j, pauli: PauliString::from_factors(n, &[(a, *axis), (b, *axis)])? });
        }
    }
    HamiltonianTerms::new(n, terms)
}
