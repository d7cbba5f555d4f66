//! Retarded Green's functions of lattice models from differentiated
//! Trotter circuits.
//!
//! The crate is layered bottom-up:
//!
//! * [`qsim`] is a dense statevector engine (qubit 0 is the least
//!   significant bit of the amplitude index everywhere).
//! * [`models`] builds Heisenberg and Fermi-Hubbard Hamiltonians, their
//!   Trotter circuits and exact spectral data.
//! * [`perturbations`] turns a Trotter circuit into a differentiable
//!   template with kick slots.
//! * [`estimators`] implements the finite-difference, parameter-shift and
//!   simultaneous-perturbation estimators.
//! * [`spectra`] post-processes traces into spectra and structure factors.

pub mod error;
pub mod estimators;
pub mod models;
pub mod perturbations;
pub mod qsim;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
