use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a trace measures.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub readout: String,
    pub kick: String,
    pub estimator: String,
    pub model: String,
}

/// Response values on a time grid with per-point standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub meta: TraceMeta,
}

impl GreenTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, std_errors: Vec<f64>, meta: TraceMeta) -> Result<Self> {
        if values.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), got: values.len() });
        }
        if std_errors.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), got: std_errors.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Numerical("trace times must be strictly increasing".into()));
        }
        if std_errors.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Numerical("standard errors must be non-negative".into()));
        }
        Ok(Self { times, values, std_errors, meta })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Euclidean distance to reference values on the same grid.
    pub fn residual_norm(&self, reference: &[f64]) -> Result<f64> {
        if reference.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: reference.len() });
        }
        Ok(self.values.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
    }

    /// Fraction of points within `k` standard errors of the reference.
    pub fn fraction_within(&self, reference: &[f64], k: f64) -> Result<f64> {
        if reference.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: reference.len() });
        }
        let hits = self
            .values
            .iter()
            .zip(reference)
            .zip(&self.std_errors)
            .filter(|((v, r), s)| (*v - *r).abs() <= k * **s)
            .count();
        Ok(hits as f64 / self.len().max(1) as f64)
    }
}

/// A complex-valued trace as a pair of real traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexTrace {
    pub real: GreenTrace,
    pub imag: GreenTrace,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        let m = TraceMeta::default();
        assert!(GreenTrace::new(vec![0.0, 0.0], vec![0.0; 2], vec![0.0; 2], m.clone()).is_err());
        assert!(GreenTrace::new(vec![0.0, 1.0], vec![0.0; 2], vec![-1.0, 0.0], m.clone()).is_err());
        assert!(GreenTrace::new(vec![0.0, 1.0], vec![0.0; 3], vec![0.0; 2], m).is_err());
    }

    #[test]
    fn coverage_counts_points() {
        let t = GreenTrace::new(vec![1.0, 2.0], vec![0.0, 1.0], vec![0.1, 0.1], TraceMeta::default()).unwrap();
        assert_eq!(t.fraction_within(&[0.0, 0.0], 3.0).unwrap(), 0.5);
        assert!((t.residual_norm(&[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }
}
