//! Dense statevector engine.

mod gate;
mod noise;
mod pauli;
mod rng;
mod state;

pub use gate::{Block1, Block2, Gate};
pub use noise::{apply_depolarizing, NoiseScope, NoiseSpec};
pub use pauli::{Pauli, PauliString, MAX_QUBITS};
pub use rng::RngStream;
pub use state::StateVector;
