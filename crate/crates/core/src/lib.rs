//! Outage and rate-coverage guarantees for a single frequency network (SFN)
//! serving a vehicle cluster at the origin, overlaid on a Poisson field of
//! interfering macro stations.
//!
//! - [`analytic`]: closed-form outage for an unbounded interference field.
//! - [`montecarlo`]: finite-radius simulator used as ground truth.
//! - [`optimizer`]: minimum total SFN power subject to an outage target.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod scenario;
pub mod units;

pub use analytic::{
    hypoexp_cdf, laplace_interference, omega_derivative, outage_probability, rate_coverage, HypoexpCdf,
    LaplaceParams, OutageBranch, OutageModel, OutageResult,
};
pub use error::{Result, SfnError};
pub use montecarlo::{SimConfig, SimEstimate};
pub use optimizer::{PaProblem, PaSolution};
pub use scenario::{
    build_hypoexp_spec, HypoexpSpec, InterferenceField, Scenario, ScenarioConfig, SfnBaseStation,
};
