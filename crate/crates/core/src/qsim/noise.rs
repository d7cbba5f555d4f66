use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Which gates receive a depolarizing channel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseScope {
    /// Every two-qubit gate of the simulated circuit: fused two-qubit
    /// blocks, weight-2 rotations and CNOTs. Rotations of weight three or
    /// more are lowered to CNOT ladders first.
    #[default]
    TwoQubitGates,
    /// Every CNOT after lowering the whole circuit to CNOTs and
    /// single-qubit rotations.
    NativeCnots,
}

/// Two-qubit depolarizing noise of strength `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub gamma: f64,
    #[serde(default)]
    pub scope: NoiseScope,
}

impl NoiseSpec {
    pub fn new(gamma: f64, scope: NoiseScope) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma, scope })
    }

    pub fn validate(&self) -> Result<()> {
        check_gamma(self.gamma)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

/// One stochastic trajectory of the channel
/// `ρ -> (1-γ) ρ + γ Tr_pair[ρ] ⊗ 1/4` on the pair: with probability γ a
/// uniformly random two-qubit Pauli (identity included) is applied, so a
/// non-identity Pauli occurs with probability 15γ/16.
pub fn apply_depolarizing<R: Rng + ?Sized>(
    state: &mut StateVector,
    qubits: [usize; 2],
    gamma: f64,
    rng: &mut R,
) -> Result<()> {
    check_gamma(gamma)?;
    let n = state.n_qubits();
    for q in qubits {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
    }
    if qubits[0] == qubits[1] {
        return Err(Error::RepeatedQubit(qubits[0]));
    }
    if gamma == 0.0 || rng.gen::<f64>() >= gamma {
        return Ok(());
    }
    let k = rng.gen_range(0..16usize);
    if k == 0 {
        return Ok(());
    }
    const LABELS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let p = PauliString::from_factors(n, &[(qubits[0], LABELS[k & 3]), (qubits[1], LABELS[k >> 2])])?;
    state.apply_pauli(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_gamma_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let psi = StateVector::random(3, &mut rng);
        let mut out = psi.clone();
        for _ in 0..100 {
            apply_depolarizing(&mut out, [0, 2], 0.0, &mut rng).unwrap();
        }
        assert_eq!(psi, out);
    }

    #[test]
    fn full_depolarization_kills_correlations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zz: PauliString = "ZZ".parse().unwrap();
        let trials = 100_000;
        let mut sum = 0.0;
        for _ in 0..trials {
            let mut s = StateVector::zero(2);
            apply_depolarizing(&mut s, [0, 1], 1.0, &mut rng).unwrap();
            sum += s.expectation_pauli(&zz).unwrap();
        }
        let mean = sum / trials as f64;
        assert!(mean.abs() < 3.0 / (trials as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn rejects_bad_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = StateVector::zero(2);
        assert!(apply_depolarizing(&mut s, [0, 1], 1.5, &mut rng).is_err());
        assert!(NoiseSpec::new(-0.1, NoiseScope::default()).is_err());
    }
}
