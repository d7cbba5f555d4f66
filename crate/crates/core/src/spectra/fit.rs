use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fourier::uniform_step;
use crate::error::{Error, Result};
use crate::estimators::GreenTrace;
use crate::models::LehmannTerm;

/// One sinusoid `amplitude * sin(omega t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub omega: f64,
    pub amplitude: f64,
    pub omega_err: f64,
    pub amplitude_err: f64,
}

/// A sum of sines, so the model vanishes at `t = 0` by construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    /// Sorted by frequency, all frequencies non-negative.
    pub modes: Vec<Mode>,
    pub bic: f64,
    pub residual_chi2: f64,
    pub n_points: usize,
}

impl SpectralModel {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.modes.iter().map(|m| m.amplitude * (m.omega * t).sin()).sum()
    }

    /// The sine part of `Im Σ_e c_e e^{-iω_e t}` for Lehmann terms
    /// `c_e = a_e + i b_e`, which is `-Σ_e a_e sin(ω_e t)`. Terms at zero
    /// frequency are dropped and coincident frequencies merged.
    pub fn from_lehmann(terms: &[LehmannTerm]) -> Self {
        let mut sorted: Vec<&LehmannTerm> = terms.iter().filter(|t| t.omega > 1e-9).collect();
        sorted.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        let mut modes: Vec<Mode> = Vec::new();
        for t in sorted {
            match modes.last_mut() {
                Some(m) if (t.omega - m.omega).abs() <= 1e-9 * t.omega.max(1.0) => m.amplitude -= t.a,
                _ => modes.push(Mode { omega: t.omega, amplitude: -t.a, omega_err: 0.0, amplitude_err: 0.0 }),
            }
        }
        modes.retain(|m| m.amplitude.abs() > 1e-12);
        Self { modes, bic: 0.0, residual_chi2: 0.0, n_points: 0 }
    }
}

/// Settings of the sinusoid fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_modes: usize,
    /// Candidate peaks below this fraction of the largest are ignored.
    pub peak_threshold: f64,
    /// Fit attempts per mode count (the first from the candidates, the
    /// rest with frequencies moved by one bin).
    pub restarts: usize,
    /// Zero-padding factor of the candidate search.
    pub oversample: usize,
    /// Smallest per-point standard error, relative to the largest
    /// absolute value of the data; keeps noiseless fits well posed.
    pub sigma_floor: f64,
    pub seed: u64,
}

impl FitOptions {
    pub fn new(max_modes: usize) -> Self {
        Self { max_modes, peak_threshold: 0.05, restarts: 5, oversample: 8, sigma_floor: 1e-9, seed: 0 }
    }
}

/// Positive frequencies of local maxima of `|Σ_i y_i sin(ω t_i)|`,
/// strongest first.
fn candidate_peaks(times: &[f64], y: &[f64], bin: f64, options: &FitOptions) -> Vec<f64> {
    let dt = times[1] - times[0];
    let nyquist = std::f64::consts::PI / dt;
    let step = bin / options.oversample.max(1) as f64;
    let grid: Vec<f64> = (1..).map(|j| j as f64 * step).take_while(|&w| w <= nyquist).collect();
    let mag: Vec<f64> =
        grid.iter().map(|&w| times.iter().zip(y).map(|(t, v)| v * (w * t).sin()).sum::<f64>().abs()).collect();
    let top = mag.iter().cloned().fold(0.0, f64::max);
    if !(top > 0.0) {
        return Vec::new();
    }
    let mut peaks: Vec<(f64, f64)> = (0..mag.len())
        .filter(|&j| {
            let left = if j == 0 { 0.0 } else { mag[j - 1] };
            let right = if j + 1 == mag.len() { 0.0 } else { mag[j + 1] };
            mag[j] >= left && mag[j] > right && mag[j] >= options.peak_threshold * top
        })
        .map(|j| (grid[j], mag[j]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.into_iter().map(|p| p.0).collect()
}

struct Problem<'a> {
    times: &'a [f64],
    y: &'a [f64],
    inv_sigma: Vec<f64>,
}

impl Problem<'_> {
    fn chi2(&self, p: &[f64]) -> f64 {
        self.times
            .iter()
            .zip(self.y)
            .zip(&self.inv_sigma)
            .map(|((&t, &y), &w)| {
                let f: f64 = p.chunks(2).map(|c| c[1] * (c[0] * t).sin()).sum();
                ((y - f) * w).powi(2)
            })
            .sum()
    }

    /// Weighted residuals and Jacobian of the model for parameters laid
    /// out as `[ω_0, a_0, ω_1, a_1, ...]`.
    fn linearize(&self, p: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.times.len();
        let mut r = DVector::zeros(n);
        let mut jac = DMatrix::zeros(n, p.len());
        for i in 0..n {
            let (t, w) = (self.times[i], self.inv_sigma[i]);
            let mut f = 0.0;
            for (m, c) in p.chunks(2).enumerate() {
                let (s, co) = (c[0] * t).sin_cos();
                f += c[1] * s;
                jac[(i, 2 * m)] = w * c[1] * t * co;
                jac[(i, 2 * m + 1)] = w * s;
            }
            r[i] = w * (self.y[i] - f);
        }
        (r, jac)
    }

    /// Weighted least-squares amplitudes for fixed frequencies.
    fn amplitudes(&self, omegas: &[f64]) -> Option<Vec<f64>> {
        let n = self.times.len();
        let a = DMatrix::from_fn(n, omegas.len(), |i, m| self.inv_sigma[i] * (omegas[m] * self.times[i]).sin());
        let b = DVector::from_fn(n, |i, _| self.inv_sigma[i] * self.y[i]);
        let svd = a.svd(true, true);
        svd.solve(&b, 1e-12).ok().map(|x| x.iter().copied().collect())
    }

    /// Levenberg-Marquardt from `p`; returns parameters, χ² and the
    /// diagonal of the parameter covariance.
    fn levenberg_marquardt(&self, mut p: Vec<f64>) -> Option<(Vec<f64>, f64, Vec<f64>)> {
        let mut chi2 = self.chi2(&p);
        let mut lambda = 1e-3;
        for _ in 0..500 {
            let (r, jac) = self.linearize(&p);
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for k in 0..a.nrows() {
                    a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
                }
                let Some(delta) = a.cholesky().map(|c| c.solve(&grad)) else {
                    lambda *= 4.0;
                    continue;
                };
                let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
                let c2 = self.chi2(&trial);
                if c2.is_finite() && c2 < chi2 {
                    let gain = chi2 - c2;
                    p = trial;
                    chi2 = c2;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = gain > 1e-13 * chi2.max(1e-300);
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        if !chi2.is_finite() {
            return None;
        }
        let (_, jac) = self.linearize(&p);
        let cov = (jac.transpose() * &jac).try_inverse();
        let diag = match cov {
            Some(c) => (0..p.len()).map(|k| c[(k, k)].max(0.0)).collect(),
            None => vec![f64::INFINITY; p.len()],
        };
        Some((p, chi2, diag))
    }

    /// Best of several fits started from `omegas` and their one-bin
    /// neighbours. Fits whose frequencies collapse onto each other (a
    /// near-cancelling pair with huge amplitudes) or onto zero (a ramp),
    /// or pass the Nyquist frequency, are discarded.
    fn fit(&self, omegas: &[f64], bin: f64, restarts: usize, rng: &mut ChaCha8Rng) -> Option<(Vec<f64>, f64, Vec<f64>)> {
        let nyquist = std::f64::consts::PI / (self.times[1] - self.times[0]);
        let admissible = |p: &[f64]| {
            let mut w: Vec<f64> = p.chunks(2).map(|c| c[0].abs()).collect();
            w.sort_by(f64::total_cmp);
            w.iter().all(|&x| x >= 0.5 * bin && x <= nyquist) && w.windows(2).all(|d| d[1] - d[0] >= 0.5 * bin)
        };
        let mut best: Option<(Vec<f64>, f64, Vec<f64>)> = None;
        for attempt in 0..restarts.max(1) {
            let mut start = omegas.to_vec();
            if attempt > 0 {
                let last = start.len() - 1;
                match attempt {
                    1 => start[last] += bin,
                    2 => start[last] = (start[last] - bin).max(0.25 * bin),
                    _ => {
                        for w in start.iter_mut() {
                            *w = (*w + bin * rng.gen_range(-1.0..1.0)).max(0.25 * bin);
                        }
                    }
                }
            }
            let Some(amps) = self.amplitudes(&start) else { continue };
            let p0: Vec<f64> = start.iter().zip(&amps).flat_map(|(w, a)| [*w, *a]).collect();
            if let Some(fit) = self.levenberg_marquardt(p0).filter(|f| admissible(&f.0)) {
                if best.as_ref().map_or(true, |b| fit.1 < b.1) {
                    best = Some(fit);
                }
            }
        }
        best
    }
}

/// Fits `Σ_e a_e sin(ω_e t)` with 1 to `max_modes` modes and keeps the
/// model with the lowest Bayesian information criterion
/// `χ² + 2 m ln n`.
///
/// Frequencies are seeded from the strongest peaks of the sine transform;
/// each larger model starts from the best smaller one plus the next
/// candidate, so χ² never grows along the ladder.
pub fn fit_sinusoids_bic(trace: &GreenTrace, options: &FitOptions) -> Result<SpectralModel> {
    if options.max_modes == 0 {
        return Err(Error::FitFailed("max_modes must be >= 1".into()));
    }
    let n = trace.len();
    if n < 2 {
        return Err(Error::FitFailed(format!("{n} points cannot constrain a 2-parameter mode")));
    }
    let dt = uniform_step(&trace.times)?;
    let bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let scale = trace.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (options.sigma_floor * scale).max(1e-300);
    let problem = Problem {
        times: &trace.times,
        y: &trace.values,
        inv_sigma: trace.std_errors.iter().map(|s| 1.0 / s.max(floor)).collect(),
    };
    let candidates = candidate_peaks(&trace.times, &trace.values, bin, options);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let ln_n = (n as f64).ln();
    let mut best: Option<SpectralModel> = None;
    let mut omegas: Vec<f64> = Vec::new();
    let mut pool = candidates.iter();
    for m in 1..=options.max_modes {
        if 2 * m > n {
            break;
        }
        let Some(&next) = pool.find(|&&c| c >= 0.5 * bin && omegas.iter().all(|w| (w - c).abs() > 0.5 * bin)) else { break };
        let mut start = omegas.clone();
        start.push(next);
        let Some((p, chi2, var)) = problem.fit(&start, bin, options.restarts, &mut rng) else {
            if best.is_some() {
                break;
            }
            return Err(Error::FitFailed(format!("no convergent fit with {m} modes")));
        };
        omegas = p.chunks(2).map(|c| c[0].abs()).collect();
        let mut modes: Vec<Mode> = p
            .chunks(2)
            .zip(var.chunks(2))
            .map(|(c, v)| {
                let sign = if c[0] < 0.0 { -1.0 } else { 1.0 };
                Mode { omega: c[0].abs(), amplitude: sign * c[1], omega_err: v[0].sqrt(), amplitude_err: v[1].sqrt() }
            })
            .collect();
        modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        let model = SpectralModel { modes, bic: chi2 + 2.0 * m as f64 * ln_n, residual_chi2: chi2, n_points: n };
        if best.as_ref().map_or(true, |b| model.bic < b.bic) {
            best = Some(model);
        }
    }
    match best {
        Some(b) => Ok(b),
        None if candidates.is_empty() => Ok(SpectralModel {
            modes: Vec::new(),
            residual_chi2: problem.chi2(&[]),
            bic: problem.chi2(&[]),
            n_points: n,
        }),
        None => Err(Error::FitFailed("no admissible mode count".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::TraceMeta;
    use rand_chacha::ChaCha8Rng;

    fn synthetic(modes: &[(f64, f64)], sigma: f64, seed: u64) -> GreenTrace {
        let n = 100;
        let dt = 2.0 * std::f64::consts::PI / n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times: Vec<f64> = (1..=n).map(|j| j as f64 * dt).collect();
        let values = times
            .iter()
            .map(|&t| {
                let noise: f64 = if sigma > 0.0 {
                    // Box-Muller.
                    let (u1, u2): (f64, f64) = (rng.gen::<f64>().max(1e-300), rng.gen());
                    sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                } else {
                    0.0
                };
                modes.iter().map(|(a, w)| a * (w * t).sin()).sum::<f64>() + noise
            })
            .collect();
        GreenTrace::new(times, values, vec![sigma; n], TraceMeta::default()).unwrap()
    }

    #[test]
    fn noiseless_single_mode() {
        let t = synthetic(&[(0.37, 2.71)], 0.0, 0);
        let m = fit_sinusoids_bic(&t, &FitOptions::new(3)).unwrap();
        assert_eq!(m.modes.len(), 1);
        assert!((m.modes[0].amplitude - 0.37).abs() < 1e-6);
        assert!((m.modes[0].omega - 2.71).abs() < 1e-6);
        assert!(m.evaluate(0.0).abs() < 1e-12);
    }

    #[test]
    fn two_noisy_modes_are_recovered() {
        let truth = [(0.5, 1.7), (-0.3, 4.2)];
        let mut good = 0;
        for seed in 0..100 {
            let t = synthetic(&truth, 0.02, seed);
            let m = fit_sinusoids_bic(&t, &FitOptions::new(4)).unwrap();
            if m.modes.len() != 2 {
                continue;
            }
            let ok = m.modes.iter().zip(truth.iter()).all(|(f, (a, w))| {
                (f.omega - w).abs() <= 3.0 * f.omega_err && (f.amplitude - a).abs() <= 3.0 * f.amplitude_err
            });
            if ok {
                good += 1;
            }
        }
        assert!(good >= 90, "{good}/100");
    }

    #[test]
    fn residuals_look_white() {
        let t = synthetic(&[(0.5, 1.7), (-0.3, 4.2)], 0.02, 7);
        let m = fit_sinusoids_bic(&t, &FitOptions::new(4)).unwrap();
        let z: Vec<f64> =
            t.times.iter().zip(&t.values).zip(&t.std_errors).map(|((&x, &y), &s)| (y - m.evaluate(x)) / s).collect();
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 3.0 / n.sqrt());
        assert!((0.5..=1.5).contains(&var), "{var}");
    }

    #[test]
    fn overfitting_never_collapses_modes() {
        let bin = 1.0;
        for seed in 0..40 {
            let t = synthetic(&[(0.5, 1.7), (-0.3, 4.2), (0.1, 6.5)], 0.05, seed);
            let m = fit_sinusoids_bic(&t, &FitOptions { seed, ..FitOptions::new(8) }).unwrap();
            assert!(m.modes.windows(2).all(|w| w[1].omega - w[0].omega >= 0.5 * bin), "{m:?}");
            assert!(m.modes.iter().all(|x| x.amplitude.abs() < 2.0), "{m:?}");
        }
    }

    #[test]
    fn lehmann_models_merge_and_flip_sign() {
        let terms = [
            LehmannTerm { omega: 0.0, a: 0.4, b: 0.0 },
            LehmannTerm { omega: 1.0, a: 0.1, b: 0.0 },
            LehmannTerm { omega: 1.0 + 1e-12, a: 0.2, b: 0.0 },
            LehmannTerm { omega: 2.0, a: -0.5, b: 0.0 },
        ];
        let m = SpectralModel::from_lehmann(&terms);
        assert_eq!(m.modes.len(), 2);
        assert!((m.modes[0].amplitude + 0.3).abs() < 1e-15);
        assert!((m.modes[1].amplitude - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_requests() {
        let t = synthetic(&[(0.37, 2.71)], 0.0, 0);
        assert!(fit_sinusoids_bic(&t, &FitOptions::new(0)).is_err());
        let one = GreenTrace::new(vec![0.1], vec![0.2], vec![0.0], TraceMeta::default()).unwrap();
        assert!(fit_sinusoids_bic(&one, &FitOptions::new(1)).is_err());
    }
}
