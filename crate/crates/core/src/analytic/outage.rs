//! SINR outage and rate coverage at the cluster centre for an unbounded
//! interference field.
//!
//! Conditioning on the interference `I`, the outage event is "sum of
//! exponential station powers below `z = theta (W + I) / G`", so
//! `P_T = 1 - E_I[survival(z)]`. Each survival term `(z/mu_k)^n e^{-z/mu_k}`
//! averages to an `Omega` derivative of `e^{-A x} L_I(B x)` at `x = 1`.

use super::hypoexp::HypoexpCdf;
use super::laplace::{omega_derivatives, LaplaceParams};
use crate::error::{Result, SfnError};
use crate::scenario::{station_means, HypoexpSpec, Scenario};

/// Slack allowed on a raw probability before it is treated as a numerical
/// failure rather than rounding.
pub const PROBABILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageBranch {
    /// Every station mean is distinct: single exponential per station.
    DistinctMeans,
    /// At least one repeated mean: derivative terms of the general form.
    RepeatedMeans,
    /// No interferers: plain hypoexponential CDF.
    NoiseOnly,
    /// Every station is off.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageResult {
    pub probability: f64,
    pub branch: OutageBranch,
}

fn checked_probability(raw: f64, context: &'static str) -> Result<f64> {
    if !raw.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&raw) {
        return Err(SfnError::NumericalInstability { context, value: raw });
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Outage evaluator bound to one deployment geometry. Station powers are
/// passed per call so the optimizer can reuse it.
#[derive(Debug, Clone)]
pub struct OutageModel {
    laplace: LaplaceParams,
    scenario: Scenario,
}

impl OutageModel {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        Ok(OutageModel {
            laplace: LaplaceParams::from_scenario(scenario),
            scenario: scenario.clone(),
        })
    }

    pub fn laplace(&self) -> &LaplaceParams {
        &self.laplace
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn num_stations(&self) -> usize {
        self.scenario.num_stations()
    }

    fn check_theta(theta: f64) -> Result<()> {
        if !(theta > 0.0) || theta.is_nan() {
            return Err(SfnError::domain(
                "outage_probability",
                format!("theta = {theta} must be > 0"),
            ));
        }
        Ok(())
    }

    fn spec_for(&self, powers: &[f64]) -> Result<Option<HypoexpSpec>> {
        if powers.len() != self.num_stations() {
            return Err(SfnError::invalid("powers", "one power per station required"));
        }
        if powers.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(SfnError::invalid("powers", "powers must be finite and >= 0"));
        }
        match HypoexpSpec::from_means(&station_means(&self.scenario, powers)) {
            Ok(spec) => Ok(Some(spec)),
            Err(SfnError::AllPowersZero) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Outage probability with the branch picked from the grouped means.
    pub fn outage(&self, powers: &[f64], theta: f64) -> Result<OutageResult> {
        Self::check_theta(theta)?;
        let Some(spec) = self.spec_for(powers)? else {
            return Ok(OutageResult {
                probability: 1.0,
                branch: OutageBranch::Degenerate,
            });
        };
        if self.laplace.is_interference_free() {
            let z = theta * self.scenario.noise_w / self.scenario.sfn_link_gain();
            return Ok(OutageResult {
                probability: HypoexpCdf::new(&spec).cdf(z),
                branch: OutageBranch::NoiseOnly,
            });
        }
        if spec.all_distinct() {
            Ok(OutageResult {
                probability: self.distinct_means_outage(&spec, theta)?,
                branch: OutageBranch::DistinctMeans,
            })
        } else {
            Ok(OutageResult {
                probability: self.general_outage(&spec, theta)?,
                branch: OutageBranch::RepeatedMeans,
            })
        }
    }

    /// General form valid for any multiplicities.
    pub fn general_outage(&self, spec: &HypoexpSpec, theta: f64) -> Result<f64> {
        Self::check_theta(theta)?;
        let cdf = HypoexpCdf::new(spec);
        let gain = self.scenario.sfn_link_gain();
        let mut survival = 0.0;
        for block in cdf.blocks() {
            let b = theta / (gain * block.mean);
            let a = b * self.scenario.noise_w;
            let omegas = omega_derivatives(&self.laplace, a, b, block.coeffs.len() - 1);
            survival += block.coeffs.iter().zip(&omegas).map(|(c, w)| c * w).sum::<f64>();
        }
        checked_probability(1.0 - survival, "general outage expansion")
    }

    /// Closed form for pairwise distinct means:
    /// `P_T = 1 - prod_j mu_j^-1 sum_k D_k L_I(B_k)` with
    /// `D_k = mu_k e^{-A_k} prod_{j != k} (1/mu_j - 1/mu_k)^-1`.
    pub fn distinct_means_outage(&self, spec: &HypoexpSpec, theta: f64) -> Result<f64> {
        Self::check_theta(theta)?;
        if !spec.all_distinct() {
            return Err(SfnError::invalid(
                "hypoexp",
                "distinct-means form needs multiplicity 1 everywhere",
            ));
        }
        let means = spec.distinct_means();
        let gain = self.scenario.sfn_link_gain();
        let log_prod_inv: f64 = -means.iter().map(|m| m.ln()).sum::<f64>();
        let mut survival = 0.0;
        for (k, &mu_k) in means.iter().enumerate() {
            let b = theta / (gain * mu_k);
            let a = b * self.scenario.noise_w;
            let mut log_mag = log_prod_inv + mu_k.ln() - a + self.laplace.ln_transform(b);
            let mut sign = 1.0;
            for (j, &mu_j) in means.iter().enumerate() {
                if j == k {
                    continue;
                }
                let diff = 1.0 / mu_j - 1.0 / mu_k;
                log_mag -= diff.abs().ln();
                if diff < 0.0 {
                    sign = -sign;
                }
            }
            survival += sign * log_mag.exp();
        }
        checked_probability(1.0 - survival, "distinct-means outage")
    }
}

pub fn outage_probability(scenario: &Scenario, theta: f64) -> Result<OutageResult> {
    OutageModel::new(scenario)?.outage(&scenario.powers(), theta)
}

/// SINR threshold equivalent to rate `kappa` under
/// `rate = H sigma log2(1 + J SINR)`.
pub fn rate_threshold(scenario: &Scenario, kappa: f64) -> f64 {
    (kappa / (scenario.rate_h * scenario.bandwidth_hz) * std::f64::consts::LN_2).exp_m1() / scenario.rate_j
}

/// Probability that the corrected Shannon rate exceeds `kappa` bit/s.
pub fn rate_coverage(scenario: &Scenario, kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(SfnError::domain(
            "rate_coverage",
            format!("kappa = {kappa} must be >= 0"),
        ));
    }
    scenario.validate()?;
    if kappa == 0.0 {
        return Ok(1.0);
    }
    let theta = rate_threshold(scenario, kappa);
    if theta.is_infinite() {
        return Ok(0.0);
    }
    Ok(1.0 - outage_probability(scenario, theta)?.probability)
}
