use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the SCP variance model for one gradient component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceModel {
    /// Shot-noise constant; `1` saturates the bound.
    pub c_scp: f64,
    pub perturbations: u64,
    pub shots_per_perturbation: u64,
    pub epsilon: f64,
    /// `‖∇E‖²`.
    pub grad_norm_sq: f64,
    /// `(∇E^(k))²`.
    pub grad_component_sq: f64,
}

impl VarianceModel {
    pub fn validate(&self) -> Result<()> {
        if self.perturbations == 0 || self.shots_per_perturbation == 0 {
            return Err(Error::InvalidConfig("P and S must be >= 1".into()));
        }
        if !(self.epsilon > 0.0) || !(self.c_scp >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be positive and c_scp non-negative".into()));
        }
        Ok(())
    }

    /// Direction-sampling term `(‖∇E‖² - (∇E^(k))²) / P`.
    pub fn direction_term(&self) -> f64 {
        (self.grad_norm_sq - self.grad_component_sq).max(0.0) / self.perturbations as f64
    }

    /// Shot-noise term `c / (P S ε²)`.
    pub fn shot_term(&self) -> f64 {
        self.c_scp / (self.perturbations as f64 * self.shots_per_perturbation as f64 * self.epsilon.powi(2))
    }
}

/// Predicted variance of one SCP gradient component.
pub fn predicted_variance(model: &VarianceModel) -> Result<f64> {
    model.validate()?;
    Ok(model.direction_term() + model.shot_term())
}

/// Variance `(1 - e²) / shots` of a sample mean of ±1 outcomes with
/// expectation `e`.
pub fn lcp_point_variance(expectation: f64, shots: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be >= 1".into()));
    }
    Ok((1.0 - expectation * expectation).max(0.0) / shots as f64)
}
