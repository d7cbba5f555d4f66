//! Differentiable circuit templates.

mod fermion;
mod probability;
mod template;

pub use fermion::{build_fermionic_kick, Quadrature};
pub use probability::{build_probability_oracle, ProbabilityOracle};
pub use template::{
    bind_rademacher, build_equal_time_template, build_lcp_template, build_scp_template, kick_site, CircuitTemplate,
    PerturbationSlot, RademacherVector,
};
