use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{ComplexTrace, GreenTrace};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    /// Transform the samples as given.
    #[default]
    None,
    /// Odd extension about `t = 0` (with `x(0) = 0` prepended when the
    /// grid starts one step after zero), suited to sine-like signals.
    Symmetrized,
}

/// Unitary discrete Fourier transform `X_k = n^{-1/2} Σ_j x_j e^{-2πi jk/n}`
/// with angular frequencies `2πk/(n dt)` folded into `[-π/dt, π/dt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub window: Window,
}

impl SpectrumResult {
    pub fn energy(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub(crate) fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::NonUniformGrid("need at least two samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let tol = 1e-9 * dt.abs().max(times[times.len() - 1].abs());
    for (j, t) in times.iter().enumerate() {
        if (t - (times[0] + j as f64 * dt)).abs() > tol {
            return Err(Error::NonUniformGrid(format!("sample {j} at {t} is off the grid")));
        }
    }
    if !(dt > 0.0) {
        return Err(Error::NonUniformGrid("time step must be positive".into()));
    }
    Ok(dt)
}

pub(crate) fn dft(x: &[f64], dt: f64, window: Window) -> SpectrumResult {
    dft_complex(x.iter().map(|&v| Complex64::new(v, 0.0)).collect(), dt, window)
}

fn dft_complex(mut buf: Vec<Complex64>, dt: f64, window: Window) -> SpectrumResult {
    let n = buf.len();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (n as f64).sqrt();
    let frequencies = (0..n)
        .map(|k| {
            let signed = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
            2.0 * std::f64::consts::PI * signed / (n as f64 * dt)
        })
        .collect();
    SpectrumResult { frequencies, amplitudes: buf.into_iter().map(|a| a * norm).collect(), window }
}

/// Discrete Fourier transform of a uniformly sampled trace.
pub fn fourier_time(trace: &GreenTrace, window: Window) -> Result<SpectrumResult> {
    let dt = uniform_step(&trace.times)?;
    let x = match window {
        Window::None => trace.values.clone(),
        Window::Symmetrized => {
            let mut z = Vec::with_capacity(trace.len() + 1);
            if (trace.times[0] - dt).abs() <= 1e-9 * dt {
                z.push(0.0);
            } else if trace.times[0].abs() > 1e-9 * dt {
                return Err(Error::NonUniformGrid("symmetrized transform needs a grid anchored at t = 0".into()));
            }
            z.extend_from_slice(&trace.values);
            let mut w = z.clone();
            w.extend(z[1..].iter().rev().map(|v| -v));
            w
        }
    };
    Ok(dft(&x, dt, window))
}

/// Frequency and magnitude of the largest positive-frequency component,
/// refined on an `oversample`-times zero-padded grid.
pub fn dominant_peak(trace: &GreenTrace, oversample: usize) -> Result<(f64, f64)> {
    let dt = uniform_step(&trace.times)?;
    let n = trace.len() * oversample.max(1);
    let mut x = trace.values.clone();
    x.resize(n, 0.0);
    let s = dft(&x, dt, Window::None);
    let scale = (n as f64).sqrt() / (trace.len() as f64).sqrt();
    s.frequencies
        .iter()
        .zip(&s.amplitudes)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, a)| (*w, a.norm() * scale))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::Numerical("trace too short for a positive frequency".into()))
}

/// Signed frequency `ω` (of the component `e^{iωt}`) and magnitude of the
/// largest component of a complex trace `real + i imag`, refined on an `oversample`-times zero-padded grid.
pub fn dominant_peak_complex(trace: &ComplexTrace, oversample: usize) -> Result<(f64, f64)> {
    let dt = uniform_step(&trace.real.times)?;
    if trace.imag.times != trace.real.times {
        return Err(Error::NonUniformGrid("real and imaginary parts use different grids".into()));
    }
    let len = trace.real.len();
    let n = len * oversample.max(1);
    let mut x: Vec<Complex64> =
        trace.real.values.iter().zip(&trace.imag.values).map(|(&re, &im)| Complex64::new(re, im)).collect();
    x.resize(n, Complex64::new(0.0, 0.0));
    let s = dft_complex(x, dt, Window::None);
    let scale = (n as f64).sqrt() / (len as f64).sqrt();
    s.frequencies
        .iter()
        .zip(&s.amplitudes)
        .map(|(w, a)| (*w, a.norm() * scale))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::Numerical("empty trace".into()))
}
