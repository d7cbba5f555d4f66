use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::measure::{Readout, Shots};
use crate::error::{Error, Result};
use crate::perturbations::CircuitTemplate;
use crate::qsim::StateVector;

/// One response point per template observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
}

fn single_slot(template: &CircuitTemplate) -> Result<()> {
    if template.slots().len() != 1 {
        return Err(Error::InvalidPerturbation(format!(
            "local estimators need exactly one slot, template has {}",
            template.slots().len()
        )));
    }
    Ok(())
}

/// Mean readouts at one slot angle.
pub(crate) fn evaluate<R: Rng + ?Sized>(
    template: &CircuitTemplate,
    readout: &Readout,
    initial: &StateVector,
    angles: &[f64],
    shots: Shots,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match (shots, template.noise()) {
        (Shots::Exact, None) => readout.exact(&template.evolve(initial, angles)?),
        (Shots::Exact, Some(_)) => {
            Err(Error::InvalidConfig("exact expectations are unavailable with stochastic noise".into()))
        }
        (Shots::Finite(0), _) => Err(Error::InvalidConfig("shot count must be positive".into())),
        (Shots::Finite(_), None) => readout.estimate(&template.evolve(initial, angles)?, shots, rng),
        (Shots::Finite(n), Some(_)) => {
            let mut sums = vec![0.0; readout.len()];
            for _ in 0..n {
                let state = template.evolve_noisy(initial, angles, rng)?;
                readout.sample_into(&state, 1, rng, &mut sums);
            }
            Ok(sums.into_iter().map(|s| s / n as f64).collect())
        }
    }
}

/// Binomial variance of a sample mean of ±1 outcomes.
fn mean_variance(mean: f64, shots: Shots) -> f64 {
    match shots {
        Shots::Exact => 0.0,
        Shots::Finite(n) => (1.0 - mean * mean).max(0.0) / n as f64,
    }
}

/// `scale * [F(a) - F(-a)]` with its standard error.
fn symmetric_difference<R: Rng + ?Sized>(
    template: &CircuitTemplate,
    initial: &StateVector,
    shift: f64,
    scale: f64,
    shots: Shots,
    rng: &mut R,
) -> Result<LocalPoint> {
    single_slot(template)?;
    let readout = Readout::new(template.observables())?;
    let plus = evaluate(template, &readout, initial, &[shift], shots, rng)?;
    let minus = evaluate(template, &readout, initial, &[-shift], shots, rng)?;
    let values = plus.iter().zip(&minus).map(|(p, m)| scale * (p - m)).collect();
    let std_errors = plus
        .iter()
        .zip(&minus)
        .map(|(&p, &m)| scale.abs() * (mean_variance(p, shots) + mean_variance(m, shots)).sqrt())
        .collect();
    Ok(LocalPoint { values, std_errors })
}

/// Symmetric finite difference `[F(ε/2) - F(-ε/2)] / ε`.
pub fn estimate_fd<R: Rng + ?Sized>(
    template: &CircuitTemplate,
    initial: &StateVector,
    epsilon: f64,
    shots: Shots,
    rng: &mut R,
) -> Result<LocalPoint> {
    if !(epsilon.is_finite() && epsilon != 0.0) {
        return Err(Error::InvalidConfig(format!("finite-difference increment must be nonzero, got {epsilon}")));
    }
    symmetric_difference(template, initial, epsilon / 2.0, 1.0 / epsilon, shots, rng)
}

/// Parameter-shift estimate `[F(π/2) - F(-π/2)] / 2`, exact for a Pauli
/// generator up to shot noise.
pub fn estimate_lcp<R: Rng + ?Sized>(
    template: &CircuitTemplate,
    initial: &StateVector,
    shots: Shots,
    rng: &mut R,
) -> Result<LocalPoint> {
    single_slot(template)?;
    if !template.slots()[0].generator.is_hermitian() {
        return Err(Error::InvalidPerturbation("parameter shift needs a Hermitian Pauli generator".into()));
    }
    symmetric_difference(template, initial, FRAC_PI_2, 0.5, shots, rng)
}
