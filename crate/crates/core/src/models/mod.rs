//! Lattice Hamiltonians, Trotter circuits and exact spectra.

mod compile;
mod exact;
mod hubbard;
mod spin;
mod terms;
mod trotter;

use serde::{Deserialize, Serialize};

pub use compile::{cnot_count, compile_block, compile_native, lower_rotation, lower_wide_rotations};
pub use exact::{
    ground_state_exact, ground_state_in_sector, lehmann_overlaps, LehmannTerm, Sector, SpectralData,
    DENSE_QUBIT_LIMIT,
};
pub use hubbard::{build_hubbard_terms_jw, jw_ladder, HubbardSpec, Species};
pub(crate) use hubbard::jw_string;
pub use spin::{build_heisenberg_terms, SpinChainSpec};
pub use terms::{HamiltonianTerms, PauliSum, Term};
pub use trotter::{trotter_step_circuit, TrotterPlan};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Nearest-neighbour bonds, those with an even left site first. A
/// two-site ring has a single bond.
pub(crate) fn chain_bonds(length: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..length - 1).map(|r| (r, r + 1)).collect();
    if boundary == Boundary::Periodic {
        if length > 2 {
            bonds.push((length - 1, 0));
        } else {
            log::warn!("a two-site ring has one bond; the wrap bond is not counted twice");
        }
    }
    let (even, odd): (Vec<_>, Vec<_>) = bonds.into_iter().partition(|(a, _)| a % 2 == 0);
    even.into_iter().chain(odd).collect()
}
