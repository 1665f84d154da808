//! Finite-radius simulator for the SINR at the cluster centre.
//!
//! Trials are split into fixed-size chunks. Chunk `c` draws from a ChaCha8
//! stream keyed by `(seed, c)`, so results are identical for any number of
//! rayon workers. Estimates are reduced from integer success counts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;

use crate::analytic::rate_threshold;
use crate::error::{Result, SfnError};
use crate::scenario::{InterferenceField, Scenario};

/// Trials per RNG stream.
pub const CHUNK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Overrides the scenario's field radius when set.
    pub radius_m: Option<f64>,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimConfig {
            trials,
            seed,
            radius_m: None,
        }
    }

    pub fn with_radius(mut self, radius_m: f64) -> Self {
        self.radius_m = Some(radius_m);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SfnError::invalid("trials", "must be >= 1"));
        }
        if let Some(r) = self.radius_m {
            if !(r > 0.0) || !r.is_finite() {
                return Err(SfnError::invalid("radius_m", "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl SimEstimate {
    pub fn from_count(successes: u64, trials: u64) -> Self {
        let mean = successes as f64 / trials as f64;
        SimEstimate {
            mean,
            std_error: (mean * (1.0 - mean) / trials as f64).sqrt(),
            trials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub distance_m: f64,
    pub is_los: bool,
}

/// One PPP realization on the disk of radius `radius_m` around the origin.
pub fn sample_interferers<R: Rng + ?Sized>(
    field: &InterferenceField,
    radius_m: f64,
    rng: &mut R,
) -> Vec<Interferer> {
    let mean_count = field.lambda_i * PI * radius_m * radius_m;
    if !(mean_count > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean_count)
        .expect("positive finite Poisson mean")
        .sample(rng) as usize;
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            Interferer {
                distance_m: radius_m * u.sqrt(),
                is_los: rng.random_bool(field.p_los),
            }
        })
        .collect()
}

/// Received powers at the origin for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub signal_w: f64,
    pub interference_w: f64,
    pub noise_w: f64,
}

impl LinkSample {
    pub fn sinr(&self) -> f64 {
        self.signal_w / (self.noise_w + self.interference_w)
    }
}

/// Builds a link sample with an arbitrary fading source (one draw per SFN
/// station, then one per interferer).
pub fn link_with_fading(
    scenario: &Scenario,
    interferers: &[Interferer],
    mut fading: impl FnMut() -> f64,
) -> LinkSample {
    let signal: f64 = scenario
        .sfn_stations
        .iter()
        .map(|s| s.power_w * fading() * s.distance_m().powf(-scenario.alpha_los))
        .sum();
    let interference: f64 = interferers
        .iter()
        .map(|i| {
            let alpha = if i.is_los {
                scenario.alpha_los
            } else {
                scenario.alpha_nlos
            };
            fading() * i.distance_m.powf(-alpha)
        })
        .sum();
    LinkSample {
        signal_w: scenario.sfn_link_gain() * signal,
        interference_w: scenario.interferer_link_scale() * interference,
        noise_w: scenario.noise_w,
    }
}

pub fn sample_link<R: Rng + ?Sized>(scenario: &Scenario, radius_m: f64, rng: &mut R) -> LinkSample {
    let interferers = sample_interferers(&scenario.interference, radius_m, rng);
    let mut fading_rng = || -> f64 { Exp1.sample(rng) };
    // Interferer positions are drawn first; fading afterwards.
    link_with_fading(scenario, &interferers, &mut fading_rng)
}

pub fn simulate_sinr_once<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> f64 {
    sample_link(scenario, scenario.interference.radius_m, rng).sinr()
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `config.trials` link draws and, for each of `n_events` events,
/// counts the trials where `event(sample, index)` holds.
fn count_events<F>(scenario: &Scenario, config: &SimConfig, n_events: usize, event: F) -> Vec<u64>
where
    F: Fn(&LinkSample, usize) -> bool + Sync,
{
    let radius = config.radius_m.unwrap_or(scenario.interference.radius_m);
    let chunks = config.trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(config.seed, chunk);
            let start = chunk * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(config.trials);
            let mut counts = vec![0u64; n_events];
            for _ in start..end {
                let link = sample_link(scenario, radius, &mut rng);
                for (i, c) in counts.iter_mut().enumerate() {
                    if event(&link, i) {
                        *c += 1;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; n_events],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn prepare(scenario: &Scenario, config: &SimConfig) -> Result<()> {
    scenario.validate()?;
    config.validate()
}

/// Outage estimates for several thresholds from one shared set of trials.
/// Each entry equals the corresponding single-threshold
/// [`estimate_outage`] call with the same config.
pub fn estimate_outage_curve(
    scenario: &Scenario,
    thetas: &[f64],
    config: &SimConfig,
) -> Result<Vec<SimEstimate>> {
    prepare(scenario, config)?;
    if let Some(&bad) = thetas.iter().find(|t| !(**t >= 0.0)) {
        return Err(SfnError::domain(
            "estimate_outage",
            format!("theta = {bad} must be >= 0"),
        ));
    }
    let counts = count_events(scenario, config, thetas.len(), |link, i| link.sinr() < thetas[i]);
    Ok(counts
        .into_iter()
        .map(|c| SimEstimate::from_count(c, config.trials))
        .collect())
}

pub fn estimate_outage(scenario: &Scenario, theta: f64, config: &SimConfig) -> Result<SimEstimate> {
    Ok(estimate_outage_curve(scenario, &[theta], config)?[0])
}

/// Rate coverage `P[H sigma log2(1 + J SINR) > kappa]` for several targets
/// from one shared set of trials.
pub fn estimate_rate_coverage_curve(
    scenario: &Scenario,
    kappas: &[f64],
    config: &SimConfig,
) -> Result<Vec<SimEstimate>> {
    prepare(scenario, config)?;
    if let Some(&bad) = kappas.iter().find(|k| !(**k >= 0.0)) {
        return Err(SfnError::domain(
            "estimate_rate_coverage",
            format!("kappa = {bad} must be >= 0"),
        ));
    }
    let scale = scenario.rate_h * scenario.bandwidth_hz;
    let j = scenario.rate_j;
    let counts = count_events(scenario, config, kappas.len(), |link, i| {
        scale * (j * link.sinr()).ln_1p() / std::f64::consts::LN_2 > kappas[i]
    });
    Ok(counts
        .into_iter()
        .map(|c| SimEstimate::from_count(c, config.trials))
        .collect())
}

pub fn estimate_rate_coverage(scenario: &Scenario, kappa: f64, config: &SimConfig) -> Result<SimEstimate> {
    Ok(estimate_rate_coverage_curve(scenario, &[kappa], config)?[0])
}

/// SINR threshold matching a rate target, shared with the analytic side.
pub fn rate_to_sinr_threshold(scenario: &Scenario, kappa: f64) -> f64 {
    rate_threshold(scenario, kappa)
}

/// Empirical `E[exp(-s I)]` with its standard error, one entry per `s`.
pub fn empirical_laplace(
    scenario: &Scenario,
    s_values: &[f64],
    config: &SimConfig,
) -> Result<Vec<(f64, f64)>> {
    prepare(scenario, config)?;
    let radius = config.radius_m.unwrap_or(scenario.interference.radius_m);
    let n = s_values.len();
    let chunks = config.trials.div_ceil(CHUNK_TRIALS);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(config.seed, chunk);
            let start = chunk * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(config.trials);
            let mut s1 = vec![0.0; n];
            let mut s2 = vec![0.0; n];
            for _ in start..end {
                let i = sample_link(scenario, radius, &mut rng).interference_w;
                for (k, &s) in s_values.iter().enumerate() {
                    let v = (-s * i).exp();
                    s1[k] += v;
                    s2[k] += v * v;
                }
            }
            (s1, s2)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((vec![0.0; n], vec![0.0; n]), |(mut a1, mut a2), (b1, b2)| {
            a1.iter_mut().zip(b1).for_each(|(x, y)| *x += y);
            a2.iter_mut().zip(b2).for_each(|(x, y)| *x += y);
            (a1, a2)
        });
    let t = config.trials as f64;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s1, &s2)| {
            let mean = s1 / t;
            let var = (s2 / t - mean * mean).max(0.0);
            (mean, (var / t).sqrt())
        })
        .collect())
}

/// Field radius that keeps the truncation error of the LOS interference
/// below `epsilon`: `R = epsilon^(-1/(alpha_los - 1))`.
pub fn choose_radius(alpha_los: f64, epsilon: f64) -> Result<f64> {
    if !(alpha_los > 1.0) {
        return Err(SfnError::domain(
            "choose_radius",
            format!("alpha_los = {alpha_los} must be > 1"),
        ));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(SfnError::domain(
            "choose_radius",
            format!("epsilon = {epsilon} must lie in (0, 1]"),
        ));
    }
    Ok(epsilon.powf(-1.0 / (alpha_los - 1.0)))
}
