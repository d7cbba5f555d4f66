//! Green's-function estimators: finite difference, parameter shift and
//! simultaneous perturbation, plus the fermionic adapter and the variance
//! model.

mod config;
mod fermion;
mod local;
mod measure;
mod scp;
mod trace;
mod variance;

pub use config::{EstimatorConfig, EstimatorMode};
pub use fermion::{estimate_fermionic_equal_time, estimate_fermionic_gf, Family, FermionicRun, FermionicSetup};
pub use local::{estimate_fd, estimate_lcp, LocalPoint};
pub use measure::Shots;
pub use scp::{estimate_scp, ScpSamples};
pub use trace::{ComplexTrace, GreenTrace, TraceMeta};
pub use variance::{lcp_point_variance, predicted_variance, VarianceModel};
