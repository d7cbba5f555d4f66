use serde::{Deserialize, Serialize};

use super::fit::SpectralModel;
use crate::error::{Error, Result};

/// Normalized structure factor on a `(q, ω)` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DsfGrid {
    /// `2πk/L` for `k ∈ [0, L)`.
    pub q: Vec<f64>,
    pub omega: Vec<f64>,
    /// `intensities[k][j]` at `(q[k], omega[j])`, non-negative with maximum 1.
    pub intensities: Vec<Vec<f64>>,
    pub sigma: f64,
    /// `2π / max ω_e`, the frequency rescaling used for plots only.
    pub omega_scale: f64,
}

impl DsfGrid {
    pub fn at(&self, k: usize, j: usize) -> f64 {
        self.intensities[k][j]
    }

    /// Largest absolute difference to another grid of the same shape.
    pub fn linf_distance(&self, other: &DsfGrid) -> Result<f64> {
        if self.q.len() != other.q.len() || self.omega.len() != other.omega.len() {
            return Err(Error::LengthMismatch { expected: self.q.len() * self.omega.len(), got: other.q.len() * other.omega.len() });
        }
        Ok(self
            .intensities
            .iter()
            .flatten()
            .zip(other.intensities.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `S(q, ω) = Σ_{r,e} w_{r,e} cos(q r) G_σ(ω - ω_e)` from one fitted model
/// per site separation `r`, with `w = -amplitude` (the sine amplitude of
/// the response is minus the Lehmann weight). Negative intensities are
/// clamped and the grid scaled to maximum 1.
pub fn assemble_dsf(models: &[SpectralModel], sigma: f64, omega: &[f64]) -> Result<DsfGrid> {
    let l = models.len();
    if l < 2 {
        return Err(Error::InvalidModel(format!("structure factor needs at least 2 sites, got {l}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidModel(format!("broadening must be positive, got {sigma}")));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let norm = 1.0 / (sigma * two_pi.sqrt());
    let gauss = |x: f64| norm * (-0.5 * (x / sigma).powi(2)).exp();
    // Per-site line shapes on the ω grid.
    let shapes: Vec<Vec<f64>> = models
        .iter()
        .map(|m| omega.iter().map(|&w| m.modes.iter().map(|e| -e.amplitude * gauss(w - e.omega)).sum()).collect())
        .collect();
    let mut intensities: Vec<Vec<f64>> = (0..l)
        .map(|k| {
            let mut row = vec![0.0; omega.len()];
            for (r, shape) in shapes.iter().enumerate() {
                // Reduce k r mod L to the nearer side so that k and L - k agree bitwise.
                let m = (k * r) % l;
                let c = (two_pi * m.min(l - m) as f64 / l as f64).cos();
                for (v, s) in row.iter_mut().zip(shape) {
                    *v += c * s;
                }
            }
            row
        })
        .collect();
    let top = intensities.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
    for v in intensities.iter_mut().flatten() {
        *v = if top > 0.0 { v.max(0.0) / top } else { 0.0 };
    }
    let max_omega = models.iter().flat_map(|m| m.modes.iter().map(|e| e.omega)).fold(0.0, f64::max);
    Ok(DsfGrid {
        q: (0..l).map(|k| two_pi * k as f64 / l as f64).collect(),
        omega: omega.to_vec(),
        intensities,
        sigma,
        omega_scale: if max_omega > 0.0 { two_pi / max_omega } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Mode;

    fn model(modes: &[(f64, f64)]) -> SpectralModel {
        SpectralModel {
            modes: modes.iter().map(|&(w, a)| Mode { omega: w, amplitude: a, omega_err: 0.0, amplitude_err: 0.0 }).collect(),
            bic: 0.0,
            residual_chi2: 0.0,
            n_points: 0,
        }
    }

    fn grid() -> Vec<f64> {
        (0..200).map(|j| j as f64 * 0.05).collect()
    }

    #[test]
    fn on_site_mode_gives_flat_ridge() {
        let mut models = vec![model(&[(3.0, -0.5)])];
        models.extend((1..6).map(|_| model(&[])));
        let d = assemble_dsf(&models, 0.2, &grid()).unwrap();
        for k in 0..6 {
            assert_eq!(d.intensities[k], d.intensities[0]);
        }
        let peak = (0..200).max_by(|&a, &b| d.at(0, a).total_cmp(&d.at(0, b))).unwrap();
        assert_eq!(peak, 60);
        assert_eq!(d.at(0, 60), 1.0);
    }

    #[test]
    fn q_symmetry_is_exact() {
        let models: Vec<SpectralModel> =
            (0..7).map(|r| model(&[(1.0 + r as f64 * 0.3, 0.2 - 0.1 * r as f64), (4.0, -0.1)])).collect();
        let d = assemble_dsf(&models, 0.2, &grid()).unwrap();
        for k in 1..7 {
            assert_eq!(d.intensities[k], d.intensities[7 - k]);
        }
        assert!(d.intensities.iter().flatten().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn rejects_single_site() {
        assert!(assemble_dsf(&[model(&[(1.0, 1.0)])], 0.2, &grid()).is_err());
    }
}
