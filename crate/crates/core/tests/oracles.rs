//! Independent oracles that back the closed forms and the solvers.

mod common;

use std::f64::consts::PI;

use rand::Rng;
use sfn_core::montecarlo::{empirical_laplace, estimate_outage_curve};
use sfn_core::optimizer::{solve_evolutionary, solve_uniform_bisection, CONSTRAINT_SLACK};
use sfn_core::units::db_to_linear;
use sfn_core::{
    build_hypoexp_spec, hypoexp_cdf, laplace_interference, outage_probability, LaplaceParams, OutageModel,
    PaProblem, Scenario, SimConfig,
};

use common::*;

/// `E[exp(-s I)]` for a PPP restricted to a disk of radius `r_max`, by
/// Simpson quadrature in `ln r`.
fn finite_disk_laplace(scenario: &Scenario, s: f64, r_max: f64) -> f64 {
    let k = s * scenario.interferer_link_scale();
    let field = &scenario.interference;
    let terms = [
        (field.lambda_los(), scenario.alpha_los),
        (field.lambda_nlos(), scenario.alpha_nlos),
    ];
    let (lo, hi) = (1e-6f64.ln(), r_max.ln());
    let n = 40_000;
    let h = (hi - lo) / n as f64;
    let mut exponent = 0.0;
    for (lambda, alpha) in terms {
        let g = |u: f64| {
            let r = u.exp();
            2.0 * PI * r * r * k / (r.powf(alpha) + k)
        };
        let mut acc = g(lo) + g(hi);
        for i in 1..n {
            acc += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        exponent += lambda * acc * h / 3.0;
    }
    (-exponent).exp()
}

#[test]
fn quadrature_oracle_converges_to_closed_form() {
    let s = Scenario::three_station_reference(0.2e-5);
    let params = LaplaceParams::from_scenario(&s);
    for sv in [1e2, 1e3, 1e4] {
        let exact = laplace_interference(&params, sv).unwrap();
        let far = finite_disk_laplace(&s, sv, 1e18);
        assert!(
            (far - exact).abs() < 1e-6 * exact.max(1e-3),
            "s={sv}: {far} vs {exact}"
        );
    }
}

#[test]
fn simulated_laplace_matches_finite_disk() {
    let s = Scenario::three_station_reference(0.2e-5);
    let s_values = [1e2, 1e3, 3e3, 1e4];
    let radius = 1e4;
    let est = empirical_laplace(&s, &s_values, &SimConfig::new(100_000, 11).with_radius(radius)).unwrap();
    for (&sv, &(mean, se)) in s_values.iter().zip(&est) {
        let oracle = finite_disk_laplace(&s, sv, radius);
        assert!(
            (mean - oracle).abs() <= 4.0 * se,
            "s={sv}: {mean} +- {se} vs {oracle}"
        );
    }
}

#[test]
fn truncation_bias_shrinks_with_radius() {
    let s = Scenario::three_station_reference(0.2e-5);
    let params = LaplaceParams::from_scenario(&s);
    let exact = laplace_interference(&params, 1e4).unwrap();
    let mut previous = f64::INFINITY;
    for radius in [1e3, 3e3, 1e4, 3e4] {
        let (mean, se) =
            empirical_laplace(&s, &[1e4], &SimConfig::new(50_000, 3).with_radius(radius)).unwrap()[0];
        let bias = mean - exact;
        assert!(
            bias > -3.0 * se,
            "finite disk below the unbounded transform at R={radius}"
        );
        assert!(bias < previous, "bias did not shrink at R={radius}");
        previous = bias;
    }
}

#[test]
fn noise_only_simulation_matches_hypoexp() {
    let mut s = Scenario::three_station_reference(0.0);
    s.sfn_stations[1].power_w = 5.0;
    let thetas: Vec<f64> = (0..=30).map(|d| db_to_linear(d as f64)).collect();
    let sim = estimate_outage_curve(&s, &thetas, &SimConfig::new(200_000, 5)).unwrap();
    let spec = build_hypoexp_spec(&s).unwrap();
    let scale = s.noise_w / s.sfn_link_gain();
    for (&theta, e) in thetas.iter().zip(sim) {
        let via_cdf = hypoexp_cdf(&spec, theta * scale);
        let via_outage = outage_probability(&s, theta).unwrap().probability;
        assert!((via_cdf - via_outage).abs() < 1e-12);
        assert!(
            (e.mean - via_cdf).abs() <= 4.0 * e.std_error + 1e-12,
            "theta={theta}"
        );
    }
}

#[test]
fn hypoexp_cdf_is_a_distribution() {
    let mut rng = rng(17);
    for _ in 0..50 {
        let spec = random_spec(&mut rng);
        assert_eq!(hypoexp_cdf(&spec, 0.0), 0.0);
        let mean: f64 = spec
            .distinct_means()
            .iter()
            .zip(spec.multiplicities())
            .map(|(&m, &o)| m * o as f64)
            .sum();
        assert!(hypoexp_cdf(&spec, 200.0 * mean) > 1.0 - 1e-12);
        let mut last = 0.0;
        for i in 1..400 {
            let v = hypoexp_cdf(&spec, i as f64 * mean / 40.0);
            assert!(v >= last - 1e-13 && v <= 1.0);
            last = v;
        }
    }
}

fn fig5_problem() -> PaProblem {
    PaProblem::new(
        Scenario::three_station_reference(0.1e-5),
        db_to_linear(6.5),
        0.1,
        30.0,
    )
    .unwrap()
}

#[test]
fn evolutionary_reruns_agree() {
    let p = fig5_problem();
    let totals: Vec<f64> = [1, 2, 3]
        .iter()
        .map(|&seed| solve_evolutionary(&p, 3200, seed).unwrap().total_power)
        .collect();
    let lo = totals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = totals.iter().cloned().fold(0.0, f64::max);
    assert!(hi <= 1.02 * lo, "{totals:?}");
}

#[test]
fn evolutionary_never_worse_than_uniform() {
    let mut rng = rng(23);
    let mut checked = 0;
    while checked < 10 {
        let s = random_scenario(&mut rng);
        let theta = db_to_linear(rng.random_range(-5.0..5.0));
        let Ok(p) = PaProblem::new(s, theta, 0.3, 40.0) else {
            continue;
        };
        let Ok(uniform) = solve_uniform_bisection(&p) else {
            continue;
        };
        let evo = solve_evolutionary(&p, 640, checked).unwrap();
        assert!(evo.feasible && evo.achieved_outage <= 0.3 + CONSTRAINT_SLACK);
        assert!(evo.total_power <= uniform.total_power * (1.0 + 1e-9));
        let model = OutageModel::new(&p.scenario).unwrap();
        let check = model.outage(&evo.powers, theta).unwrap().probability;
        assert!((check - evo.achieved_outage).abs() < 1e-12);
        checked += 1;
    }
}
