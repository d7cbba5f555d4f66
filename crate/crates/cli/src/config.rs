use std::path::{Path, PathBuf};

use rgf_core::estimators::{EstimatorConfig, EstimatorMode};
use rgf_core::models::{HubbardSpec, Species, SpinChainSpec, TrotterPlan};
use rgf_core::qsim::{NoiseSpec, Pauli};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Heisenberg(SpinChainSpec),
    Hubbard(HubbardSpec),
}

impl ModelConfig {
    pub fn n_qubits(&self) -> usize {
        match self {
            ModelConfig::Heisenberg(s) => s.length,
            ModelConfig::Hubbard(s) => s.n_qubits(),
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            ModelConfig::Heisenberg(s) => s.length,
            ModelConfig::Hubbard(s) => s.sites,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Heisenberg(_) => "heisenberg",
            ModelConfig::Hubbard(_) => "hubbard",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub total_time: f64,
    pub steps: usize,
}

impl PlanConfig {
    pub fn plan(&self) -> Result<TrotterPlan, CliError> {
        TrotterPlan::new(self.total_time, self.steps).map_err(|e| CliError::config(format!("plan: {e}")))
    }
}

/// Estimator settings; the mode comes from the subcommand and the seed
/// from the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    pub total_shots: u64,
    #[serde(default = "one")]
    pub shots_per_perturbation: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub exact_expectations: bool,
}

fn one() -> u64 {
    1
}

fn default_epsilon() -> f64 {
    0.1
}

impl EstimatorSection {
    pub fn config(&self, mode: EstimatorMode, seed: u64) -> EstimatorConfig {
        EstimatorConfig {
            mode,
            epsilon: self.epsilon,
            total_shots: self.total_shots,
            shots_per_perturbation: self.shots_per_perturbation,
            seed,
            reindex: true,
            exact_expectations: self.exact_expectations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// Which Green's functions to compute. Spin models use every
/// `(readout axis, kick axis, readout site, kick site)` combination;
/// Hubbard models use the sites and `species`, and ignore the axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesConfig {
    #[serde(default = "x_only")]
    pub readout_axes: Vec<Axis>,
    #[serde(default = "x_only")]
    pub kick_axes: Vec<Axis>,
    pub readout_sites: Vec<usize>,
    #[serde(default = "site_zero")]
    pub kick_sites: Vec<usize>,
    #[serde(default = "up")]
    pub species: Species,
}

fn x_only() -> Vec<Axis> {
    vec![Axis::X]
}

fn site_zero() -> Vec<usize> {
    vec![0]
}

fn up() -> Species {
    Species::Up
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsfConfig {
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub omega_max: f64,
    #[serde(default = "default_omega_points")]
    pub omega_points: usize,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
}

fn default_sigma() -> f64 {
    0.2
}

fn default_omega_points() -> usize {
    201
}

fn default_max_modes() -> usize {
    8
}

impl DsfConfig {
    pub fn omega_grid(&self) -> Vec<f64> {
        let n = self.omega_points;
        (0..n).map(|j| self.omega_max * j as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceConfig {
    pub total_shots: Vec<u64>,
    pub steps: Vec<usize>,
    #[serde(default = "s_one")]
    pub shots_per_perturbation: Vec<u64>,
    /// Independent LCP repetitions per point.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Number of evenly spaced points sampled for the LCP rows.
    #[serde(default = "default_lcp_points")]
    pub lcp_points: usize,
}

fn s_one() -> Vec<u64> {
    vec![1]
}

fn default_repetitions() -> usize {
    100
}

fn default_lcp_points() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    pub model: ModelConfig,
    pub plan: PlanConfig,
    #[serde(default)]
    pub estimator: Option<EstimatorSection>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    pub observables: ObservablesConfig,
    #[serde(default)]
    pub dsf: Option<DsfConfig>,
    #[serde(default)]
    pub variance: Option<VarianceConfig>,
}

fn default_outputs() -> PathBuf {
    PathBuf::from("rgf-out")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        match &self.model {
            ModelConfig::Heisenberg(s) => s.validate(),
            ModelConfig::Hubbard(s) => s.validate(),
        }
        .map_err(|e| CliError::config(format!("model: {e}")))?;
        let plan = self.plan.plan()?;
        if !(plan.total_time > 0.0) {
            return Err(CliError::config("plan.total_time must be positive"));
        }
        if let Some(e) = &self.estimator {
            if e.total_shots == 0 {
                return Err(CliError::config("estimator.total_shots must be positive"));
            }
            if e.shots_per_perturbation == 0 {
                return Err(CliError::config("estimator.shots_per_perturbation must be positive"));
            }
            if !(e.epsilon.is_finite() && e.epsilon > 0.0) {
                return Err(CliError::config("estimator.epsilon must be positive"));
            }
        }
        if let Some(n) = &self.noise {
            n.validate().map_err(|e| CliError::config(format!("noise.gamma: {e}")))?;
        }
        let sites = self.model.sites();
        let obs = &self.observables;
        if obs.readout_sites.is_empty() || obs.kick_sites.is_empty() {
            return Err(CliError::config("observables: readout_sites and kick_sites must be non-empty"));
        }
        if let Some(&s) = obs.readout_sites.iter().chain(&obs.kick_sites).find(|&&s| s >= sites) {
            return Err(CliError::config(format!("observables: site {s} outside a {sites}-site model")));
        }
        if obs.readout_axes.is_empty() || obs.kick_axes.is_empty() {
            return Err(CliError::config("observables: axis lists must be non-empty"));
        }
        if let Some(d) = &self.dsf {
            if !(d.sigma.is_finite() && d.sigma > 0.0) {
                return Err(CliError::config("dsf.sigma must be positive"));
            }
            if !(d.omega_max.is_finite() && d.omega_max > 0.0) {
                return Err(CliError::config("dsf.omega_max must be positive"));
            }
            if d.omega_points < 2 {
                return Err(CliError::config("dsf.omega_points must be at least 2"));
            }
            if d.max_modes == 0 {
                return Err(CliError::config("dsf.max_modes must be positive"));
            }
        }
        if let Some(v) = &self.variance {
            if v.total_shots.is_empty() || v.total_shots.contains(&0) {
                return Err(CliError::config("variance.total_shots must be a non-empty list of positive budgets"));
            }
            if v.steps.is_empty() || v.steps.contains(&0) {
                return Err(CliError::config("variance.steps must be a non-empty list of positive step counts"));
            }
            if v.shots_per_perturbation.is_empty() || v.shots_per_perturbation.contains(&0) {
                return Err(CliError::config("variance.shots_per_perturbation entries must be positive"));
            }
            if v.repetitions < 2 {
                return Err(CliError::config("variance.repetitions must be at least 2"));
            }
            if v.lcp_points == 0 {
                return Err(CliError::config("variance.lcp_points must be positive"));
            }
        }
        Ok(())
    }

    pub fn estimator(&self) -> Result<&EstimatorSection, CliError> {
        self.estimator.as_ref().ok_or_else(|| CliError::config("missing [estimator] table"))
    }
}
