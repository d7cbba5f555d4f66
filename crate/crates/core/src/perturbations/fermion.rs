use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{jw_string, HubbardSpec, Species};
use crate::qsim::{Pauli, PauliString};

/// Which Hermitian quadrature of a ladder operator, `a + a†` (X) or
/// `i(a† - a)` up to sign (Y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    Y,
}

impl Quadrature {
    pub fn pauli(self) -> Pauli {
        match self {
            Quadrature::X => Pauli::X,
            Quadrature::Y => Pauli::Y,
        }
    }
}

/// `Z_0 ... Z_{q-1} σ_q` for the mode `q` of `(site, species)` in the
/// blocked layout.
pub fn build_fermionic_kick(spec: &HubbardSpec, site: usize, species: Species, quadrature: Quadrature) -> Result<PauliString> {
    if site >= spec.sites {
        return Err(Error::InvalidPerturbation(format!("site {site} outside a {}-site chain", spec.sites)));
    }
    let n = spec.n_qubits();
    let q = spec.mode(site, species);
    Ok(&jw_string(n, q) * &PauliString::single(n, q, quadrature.pauli())?)
}
