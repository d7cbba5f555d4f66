use serde::{Deserialize, Serialize};

use super::measure::Shots;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    Fd,
    Lcp,
    Scp,
}

/// Shot budget and perturbation settings shared by the three estimators.
///
/// `total_shots` is the budget `P * S`. For SCP it is split into `P`
/// Rademacher directions of `S` shots each; for LCP and FD it is split
/// evenly over the time points, and each of the two evaluations of a
/// point receives that per-point share.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub mode: EstimatorMode,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    pub total_shots: u64,
    #[serde(default = "default_s")]
    pub shots_per_perturbation: u64,
    #[serde(default)]
    pub seed: u64,
    /// Report SCP components against kick-to-readout separation
    /// (`true`) or against the kick time itself.
    #[serde(default = "default_true")]
    pub reindex: bool,
    /// Replace sampled means by exact expectation values.
    #[serde(default)]
    pub exact_expectations: bool,
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_s() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

impl EstimatorConfig {
    pub fn scp(total_shots: u64, shots_per_perturbation: u64, epsilon: f64, seed: u64) -> Self {
        Self {
            mode: EstimatorMode::Scp,
            epsilon,
            total_shots,
            shots_per_perturbation,
            seed,
            reindex: true,
            exact_expectations: false,
        }
    }

    pub fn lcp(total_shots: u64, seed: u64) -> Self {
        Self { mode: EstimatorMode::Lcp, ..Self::scp(total_shots, 1, default_epsilon(), seed) }
    }

    pub fn fd(total_shots: u64, epsilon: f64, seed: u64) -> Self {
        Self { mode: EstimatorMode::Fd, ..Self::scp(total_shots, 1, epsilon, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_shots == 0 {
            return Err(Error::InvalidConfig("estimator.total_shots must be positive".into()));
        }
        if self.mode != EstimatorMode::Lcp && !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("estimator.epsilon must be positive, got {}", self.epsilon)));
        }
        if self.mode == EstimatorMode::Scp {
            let s = self.shots_per_perturbation;
            if s == 0 || self.total_shots % s != 0 {
                return Err(Error::InvalidConfig(format!(
                    "estimator.shots_per_perturbation {s} must divide total_shots {}",
                    self.total_shots
                )));
            }
            if self.perturbations() < 2 {
                return Err(Error::InvalidConfig("SCP needs at least two perturbation vectors".into()));
            }
        }
        Ok(())
    }

    /// Number of Rademacher directions `P`.
    pub fn perturbations(&self) -> usize {
        (self.total_shots / self.shots_per_perturbation.max(1)) as usize
    }

    /// Shots per SCP circuit evaluation.
    pub fn scp_shots(&self) -> Shots {
        if self.exact_expectations {
            Shots::Exact
        } else {
            Shots::Finite(self.shots_per_perturbation)
        }
    }

    /// Shots per LCP/FD evaluation when the budget covers `points` points.
    pub fn local_shots(&self, points: usize) -> Shots {
        if self.exact_expectations {
            Shots::Exact
        } else {
            Shots::Finite((self.total_shots / points.max(1) as u64).max(1))
        }
    }
}
