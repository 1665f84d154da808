//! Closed-form outage engine.

mod derivative;
mod hypoexp;
mod laplace;
mod outage;

pub use hypoexp::{hypoexp_cdf, HypoexpCdf};
pub use laplace::{laplace_interference, omega_derivative, omega_derivatives, LaplaceParams};
pub use outage::{
    outage_probability, rate_coverage, rate_threshold, OutageBranch, OutageModel, OutageResult,
    PROBABILITY_SLACK,
};
