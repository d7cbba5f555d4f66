use rand::Rng;

use crate::error::{Error, Result};
use crate::qsim::{Gate, Pauli, PauliString, StateVector};

/// A circuit followed by a coherent parity readout of a Pauli string into
/// one ancilla qubit (the highest qubit). The ancilla reads 0 with
/// probability `(1 + <obs>)/2`.
#[derive(Clone, Debug)]
pub struct ProbabilityOracle {
    n_qubits: usize,
    ancilla: usize,
    gates: Vec<Gate>,
}

impl ProbabilityOracle {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Final state from a system state (the ancilla starts in |0>).
    pub fn run(&self, system: &StateVector) -> Result<StateVector> {
        if system.n_qubits() != self.ancilla {
            return Err(Error::SizeMismatch { expected: self.ancilla, got: system.n_qubits() });
        }
        let mut state = system.extended(1);
        state.apply_all(&self.gates)?;
        Ok(state)
    }

    /// `Pr(a = 0)`.
    pub fn prob_zero(&self, system: &StateVector) -> Result<f64> {
        self.run(system)?.prob_zero(self.ancilla)
    }

    /// Number of ancilla-zero outcomes in `shots` measurements.
    pub fn sample_zeros<R: Rng + ?Sized>(&self, system: &StateVector, shots: u64, rng: &mut R) -> Result<u64> {
        let final_state = self.run(system)?;
        let mask = 1usize << self.ancilla;
        Ok((0..shots).filter(|_| final_state.sample_basis(rng) & mask == 0).count() as u64)
    }
}

/// Appends the basis change diagonalizing `obs` and a CNOT fan from its
/// support into a fresh ancilla.
pub fn build_probability_oracle(circuit: &[Gate], n_qubits: usize, obs: &PauliString) -> Result<ProbabilityOracle> {
    if obs.n_qubits() != n_qubits {
        return Err(Error::SizeMismatch { expected: n_qubits, got: obs.n_qubits() });
    }
    let sign = obs.sign().ok_or(Error::NonRealPhase)?;
    if obs.is_identity() {
        return Err(Error::InvalidPerturbation("probability oracle needs a non-identity observable".into()));
    }
    let total = n_qubits + 1;
    let ancilla = n_qubits;
    let mut gates = Vec::with_capacity(circuit.len() + 3 * obs.weight() + 1);
    for g in circuit {
        g.validate(n_qubits)?;
        gates.push(match g {
            Gate::PauliRotation { generator, angle } => {
                let widened = PauliString::from_factors(
                    total,
                    &generator.support().iter().map(|&q| (q, generator.get(q))).collect::<Vec<_>>(),
                )?
                .with_phase_exponent(generator.phase_exponent());
                Gate::rotation(widened, *angle)?
            }
            other => other.clone(),
        });
    }
    for q in obs.support() {
        match obs.get(q) {
            Pauli::X => gates.push(Gate::hadamard(q)),
            Pauli::Y => {
                gates.push(Gate::s_dagger(q));
                gates.push(Gate::hadamard(q));
            }
            _ => {}
        }
        gates.push(Gate::Cnot { control: q, target: ancilla });
    }
    if sign < 0.0 {
        gates.push(Gate::pauli_x(ancilla));
    }
    Ok(ProbabilityOracle { n_qubits: total, ancilla, gates })
}
