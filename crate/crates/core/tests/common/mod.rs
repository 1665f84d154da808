#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sfn_core::units::db_to_linear;
use sfn_core::{HypoexpSpec, InterferenceField, Scenario, SfnBaseStation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random but physically sensible deployment with 1..=4 stations.
pub fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let m = rng.random_range(1..=4);
    let sfn_stations = (0..m)
        .map(|_| {
            let d = rng.random_range(50.0..500.0);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            SfnBaseStation::new(d * phi.cos(), d * phi.sin(), rng.random_range(0.1..30.0)).unwrap()
        })
        .collect();
    let bandwidth_hz = rng.random_range(5e6..1e8);
    Scenario {
        sfn_stations,
        interference: InterferenceField {
            lambda_i: rng.random_range(1e-7..5e-6),
            p_los: rng.random_range(0.0..1.0),
            power_w: rng.random_range(1.0..40.0),
            radius_m: 1000.0,
        },
        g_s_tx: db_to_linear(rng.random_range(0.0..25.0)),
        g_i_tx: db_to_linear(rng.random_range(0.0..10.0)),
        g_rx: db_to_linear(rng.random_range(0.0..12.0)),
        alpha_los: rng.random_range(2.1..3.0),
        alpha_nlos: rng.random_range(3.0..4.5),
        noise_w: sfn_core::units::thermal_noise_watts(290.0, bandwidth_hz),
        bandwidth_hz,
        rate_h: rng.random_range(0.1..1.0),
        rate_j: rng.random_range(0.05..1.0),
    }
}

/// Random grouped spec with 1..=4 distinct means (ratio >= 1.3 apart) and
/// multiplicities 1..=3.
pub fn random_spec(rng: &mut ChaCha8Rng) -> HypoexpSpec {
    let a = rng.random_range(1..=4);
    let mut means: Vec<f64> = Vec::new();
    while means.len() < a {
        let m: f64 = 10f64.powf(rng.random_range(-1.0..1.0));
        if means.iter().all(|&x| (x / m).max(m / x) > 1.3) {
            means.push(m);
        }
    }
    let mult = (0..a).map(|_| rng.random_range(1..=3)).collect();
    HypoexpSpec::new(means, mult).unwrap()
}

pub fn sample_hypoexp(spec: &HypoexpSpec, rng: &mut ChaCha8Rng) -> f64 {
    use rand_distr::{Distribution, Exp1};
    let mut z = 0.0;
    for (&mu, &o) in spec.distinct_means().iter().zip(spec.multiplicities()) {
        for _ in 0..o {
            let e: f64 = Exp1.sample(rng);
            z += mu * e;
        }
    }
    z
}

/// Kolmogorov-Smirnov distance between `cdf` and the empirical CDF of `samples`.
pub fn ks_distance(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sided DKW half-width at confidence `1 - alpha`.
pub fn dkw_band(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Richardson-extrapolated central difference of order `n` (1..=4).
pub fn finite_difference(f: impl Fn(f64) -> f64, x: f64, n: usize, h: f64) -> f64 {
    let stencil = |h: f64| -> f64 {
        match n {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h.powi(3)),
            4 => (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / h.powi(4),
            _ => panic!("order {n} not supported"),
        }
    };
    (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0
}

/// Minimum total power over an `n x n` grid on `[0, p_max]^2` that meets
/// the outage target; returns `(total, cell)`.
pub fn grid_optimum(
    model: &sfn_core::OutageModel,
    theta: f64,
    target: f64,
    p_max: f64,
    n: usize,
) -> (f64, f64) {
    let cell = p_max / (n - 1) as f64;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let p1 = i as f64 * cell;
        // Outage is non-increasing in p2, so the first feasible p2 is optimal
        // for this p1.
        for j in 0..n {
            let p2 = j as f64 * cell;
            if p1 + p2 >= best {
                break;
            }
            if model.outage(&[p1, p2], theta).unwrap().probability <= target {
                best = p1 + p2;
                break;
            }
        }
    }
    (best, cell)
}
