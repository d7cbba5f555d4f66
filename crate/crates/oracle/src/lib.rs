//! Brute-force reference Green's functions.
//!
//! Everything here works on dense vectors with its own Pauli and
//! fermion-operator actions, sharing only domain types with `rgf-core`,
//! so agreement with the estimators is a real cross-check.

mod density;
mod fermion;
mod pauli;
mod spin;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{noisy_expectation, noisy_trotter_gradient, scp_expected_gradient};
pub use fermion::{exact_fermionic_gf, exact_trotter_fermionic_gf, free_fermion_gf, hubbard_fock_hamiltonian};
pub use spin::{
    dynamical_correlation, exact_rgf_spectral, exact_trotter_gradient, exact_trotter_rgf, exact_trotter_trace, Prefix,
};

/// Largest register the oracles accept.
pub const ORACLE_QUBIT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleSource {
    /// Continuum Hamiltonian, no Trotter error.
    Spectral,
    /// The Trotterized circuit itself.
    DenseTrotter,
}

/// A reference trace on ascending times. Spin traces are real and
/// carry zero imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleTrace {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub source: OracleSource,
}

impl OracleTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn imag(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im).collect()
    }
}

pub(crate) fn check_size(n_qubits: usize) -> rgf_core::Result<()> {
    if n_qubits > ORACLE_QUBIT_LIMIT {
        return Err(rgf_core::Error::RegisterTooLarge { n_qubits, limit: ORACLE_QUBIT_LIMIT });
    }
    Ok(())
}
