use rayon::prelude::*;

use super::config::{EstimatorConfig, EstimatorMode};
use super::local::evaluate;
use super::measure::Readout;
use super::trace::{GreenTrace, TraceMeta};
use crate::error::{Error, Result};
use crate::perturbations::{bind_rademacher, CircuitTemplate, RademacherVector};
use crate::qsim::{RngStream, StateVector};

/// Raw per-direction results of an SCP run.
///
/// For direction `p` the run stores the Rademacher bits and the symmetric
/// difference `d_p = [Ê(+εη_p) - Ê(-εη_p)] / 2ε` of every observable. The
/// gradient component `k` is the mean of `d_p η_p^(k)` over directions,
/// so any prefix of directions is itself a valid (smaller) run.
#[derive(Clone, Debug)]
pub struct ScpSamples {
    slots: usize,
    observables: usize,
    eta_bits: Vec<u64>,
    words: usize,
    diffs: Vec<f64>,
    separations: Vec<f64>,
    kick_times: Vec<f64>,
    reindex: bool,
    meta: Vec<TraceMeta>,
}

impl ScpSamples {
    pub fn directions(&self) -> usize {
        self.diffs.len() / self.observables.max(1)
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn observables(&self) -> usize {
        self.observables
    }

    /// Rademacher vector of direction `p` as ±1 values.
    pub fn eta(&self, p: usize) -> Vec<f64> {
        (0..self.slots).map(|k| self.eta_at(p, k)).collect()
    }

    /// Symmetric difference `d_p` of observable `obs`.
    pub fn difference(&self, p: usize, obs: usize) -> f64 {
        self.diffs[p * self.observables + obs]
    }

    fn eta_at(&self, p: usize, k: usize) -> f64 {
        if self.eta_bits[p * self.words + k / 64] >> (k % 64) & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    fn check(&self, obs: usize, prefix: usize) -> Result<()> {
        if obs >= self.observables {
            return Err(Error::InvalidConfig(format!("observable index {obs} out of {}", self.observables)));
        }
        if prefix < 2 || prefix > self.directions() {
            return Err(Error::InvalidConfig(format!(
                "prefix {prefix} must lie in [2, {}]",
                self.directions()
            )));
        }
        Ok(())
    }

    /// Gradient estimate and the variance of that estimate for every slot,
    /// in slot order, from the first `prefix` directions.
    pub fn gradient(&self, obs: usize, prefix: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(obs, prefix)?;
        let n = prefix as f64;
        let mut mean = vec![0.0; self.slots];
        let mut m2 = vec![0.0; self.slots];
        for p in 0..prefix {
            let d = self.difference(p, obs);
            for k in 0..self.slots {
                let x = d * self.eta_at(p, k);
                // Welford update.
                let delta = x - mean[k];
                mean[k] += delta / (p as f64 + 1.0);
                m2[k] += delta * (x - mean[k]);
            }
        }
        let var = m2.into_iter().map(|m| m / (n - 1.0) / n).collect();
        Ok((mean, var))
    }

    /// The response trace of observable `obs` from the first `prefix`
    /// directions.
    pub fn trace(&self, obs: usize, prefix: usize) -> Result<GreenTrace> {
        let (g, var) = self.gradient(obs, prefix)?;
        let mut rows: Vec<(f64, f64, f64)> = (0..self.slots)
            .map(|k| {
                let t = if self.reindex { self.separations[k] } else { self.kick_times[k] };
                (t, g[k], var[k].sqrt())
            })
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        GreenTrace::new(
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
            self.meta[obs].clone(),
        )
    }

    /// Traces of all observables from all directions.
    pub fn traces(&self) -> Result<Vec<GreenTrace>> {
        (0..self.observables).map(|o| self.trace(o, self.directions())).collect()
    }
}

/// Simultaneous-perturbation estimate of the response to every slot.
///
/// Direction `p` draws its Rademacher vector and shot outcomes from
/// `RngStream(seed, p)`, so results do not depend on scheduling.
pub fn estimate_scp(template: &CircuitTemplate, initial: &StateVector, config: &EstimatorConfig) -> Result<ScpSamples> {
    config.validate()?;
    if config.mode != EstimatorMode::Scp {
        return Err(Error::InvalidConfig("estimate_scp needs estimator.mode = scp".into()));
    }
    let slots = template.slots().len();
    if slots == 0 {
        return Err(Error::InvalidPerturbation("template has no perturbation slots".into()));
    }
    let readout = Readout::new(template.observables())?;
    let n_obs = readout.len();
    let directions = config.perturbations();
    let shots = config.scp_shots();
    let scale = 1.0 / (2.0 * config.epsilon);
    let words = slots.div_ceil(64);
    let per_direction: Vec<(Vec<u64>, Vec<f64>)> = (0..directions)
        .into_par_iter()
        .map(|p| -> Result<(Vec<u64>, Vec<f64>)> {
            let mut rng = RngStream::new(config.seed, p as u64).rng();
            let eta = RademacherVector::sample(slots, &mut rng);
            let plus = bind_rademacher(template, &eta, config.epsilon, 1)?;
            let minus = bind_rademacher(template, &eta, config.epsilon, -1)?;
            let fp = evaluate(template, &readout, initial, &plus, shots, &mut rng)?;
            let fm = evaluate(template, &readout, initial, &minus, shots, &mut rng)?;
            let mut bits = vec![0u64; words];
            for (k, &e) in eta.entries().iter().enumerate() {
                if e == 1 {
                    bits[k / 64] |= 1 << (k % 64);
                }
            }
            Ok((bits, fp.iter().zip(&fm).map(|(a, b)| scale * (a - b)).collect()))
        })
        .collect::<Result<_>>()?;
    let mut eta_bits = Vec::with_capacity(directions * words);
    let mut diffs = Vec::with_capacity(directions * n_obs);
    for (b, d) in per_direction {
        eta_bits.extend(b);
        diffs.extend(d);
    }
    let kick_times = template.slots().iter().map(|s| s.trotter_index as f64 * template.tau()).collect();
    let separations = (0..slots).map(|k| template.separation(k)).collect();
    let kick = template.slots()[0].generator.to_string();
    let meta = template
        .observables()
        .iter()
        .map(|o| TraceMeta { readout: o.to_string(), kick: kick.clone(), estimator: "scp".into(), model: String::new() })
        .collect();
    Ok(ScpSamples {
        slots,
        observables: n_obs,
        eta_bits,
        words,
        diffs,
        separations,
        kick_times,
        reindex: config.reindex,
        meta,
    })
}
