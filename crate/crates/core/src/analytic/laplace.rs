//! Laplace transform of the aggregate PPP interference at the origin under
//! Rayleigh fading, split into independent LOS and NLOS thinnings.

use std::f64::consts::PI;

use super::derivative::{exp_derivatives, falling_factorial};
use crate::error::{Result, SfnError};
use crate::scenario::Scenario;

/// `L_I(s) = exp(-c_los s^(2/alpha_los) - c_nlos s^(2/alpha_nlos))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParams {
    pub c_los: f64,
    pub c_nlos: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
}

/// Coefficient of `s^(2/alpha)` for one thinned PPP of intensity `lambda`
/// whose points transmit with scale `link_scale` (gains times power).
fn shot_noise_coefficient(lambda: f64, link_scale: f64, alpha: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let delta = 2.0 / alpha;
    2.0 * lambda * PI * PI * link_scale.powf(delta) / (alpha * (2.0 * PI / alpha).sin())
}

impl LaplaceParams {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let scale = scenario.interferer_link_scale();
        let field = &scenario.interference;
        LaplaceParams {
            c_los: shot_noise_coefficient(field.lambda_los(), scale, scenario.alpha_los),
            c_nlos: shot_noise_coefficient(field.lambda_nlos(), scale, scenario.alpha_nlos),
            alpha_los: scenario.alpha_los,
            alpha_nlos: scenario.alpha_nlos,
        }
    }

    pub fn is_interference_free(&self) -> bool {
        self.c_los == 0.0 && self.c_nlos == 0.0
    }

    /// `ln L_I(s)` for `s >= 0`.
    pub(crate) fn ln_transform(&self, s: f64) -> f64 {
        let mut out = 0.0;
        if self.c_los != 0.0 {
            out -= self.c_los * s.powf(2.0 / self.alpha_los);
        }
        if self.c_nlos != 0.0 {
            out -= self.c_nlos * s.powf(2.0 / self.alpha_nlos);
        }
        out
    }

    fn terms(&self) -> [(f64, f64); 2] {
        [
            (self.c_los, 2.0 / self.alpha_los),
            (self.c_nlos, 2.0 / self.alpha_nlos),
        ]
    }
}

pub fn laplace_interference(params: &LaplaceParams, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(SfnError::domain(
            "laplace_interference",
            format!("s = {s} must be >= 0"),
        ));
    }
    Ok(params.ln_transform(s).exp())
}

/// `[Omega_0, ..., Omega_order]` where
/// `Omega_n = (-1)^n d^n/dx^n { exp(-a x) L_I(b x) }` at `x = 1`.
///
/// Equivalently `E[U^n e^{-U}]` for `U = a + b I`.
pub fn omega_derivatives(params: &LaplaceParams, a: f64, b: f64, order: usize) -> Vec<f64> {
    // G(x) = -a x - sum c (b x)^delta, derivatives taken at x = 1.
    let mut g = vec![0.0; order + 1];
    let mut g0 = -a;
    if order >= 1 {
        g[1] = -a;
    }
    for (c, delta) in params.terms() {
        if c == 0.0 || b == 0.0 {
            continue;
        }
        let scaled = c * b.powf(delta);
        g0 -= scaled;
        for (m, gm) in g.iter_mut().enumerate().skip(1) {
            *gm -= scaled * falling_factorial(delta, m);
        }
    }
    let mut d = exp_derivatives(g0.exp(), &g, order);
    for (n, v) in d.iter_mut().enumerate() {
        if n % 2 == 1 {
            *v = -*v;
        }
    }
    d
}

pub fn omega_derivative(params: &LaplaceParams, a: f64, b: f64, order: usize) -> f64 {
    omega_derivatives(params, a, b, order)[order]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic() -> LaplaceParams {
        LaplaceParams {
            c_los: 0.37,
            c_nlos: 0.21,
            alpha_los: 2.5,
            alpha_nlos: 3.5,
        }
    }

    fn exp_g(p: &LaplaceParams, a: f64, b: f64, x: f64) -> f64 {
        (-a * x).exp() * p.ln_transform(b * x).exp()
    }

    #[test]
    fn transform_at_zero_and_without_interferers() {
        let p = generic();
        assert_eq!(laplace_interference(&p, 0.0).unwrap(), 1.0);
        let empty = LaplaceParams::from_scenario(&Scenario::three_station_reference(0.0));
        assert!(empty.is_interference_free());
        for s in [0.0, 1.0, 1e10, 1e300] {
            assert_eq!(laplace_interference(&empty, s).unwrap(), 1.0);
        }
        assert!(laplace_interference(&p, -1.0).is_err());
    }

    #[test]
    fn coefficients_match_closed_form() {
        let s = Scenario::three_station_reference(2e-6);
        let p = LaplaceParams::from_scenario(&s);
        let scale = 10f64.powf(0.7) * 10.0 * 10.0;
        let c_los = 2.0 * 0.4e-6 * PI * PI * scale.powf(0.8) / (2.5 * (0.8 * PI).sin());
        assert!((p.c_los - c_los).abs() < 1e-12 * c_los);
        assert!(p.c_nlos > 0.0);
    }

    #[test]
    fn completely_monotone_on_grid() {
        let p = generic();
        let grid: Vec<f64> = (0..60).map(|i| 1e-3 * 1.3f64.powi(i)).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&s| laplace_interference(&p, s).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0]);
        }
        // log-convexity at equally spaced triples
        for i in 0..200 {
            let s = 0.05 + 0.05 * i as f64;
            let h = 0.02;
            let l = |x: f64| p.ln_transform(x);
            assert!(l(s - h) + l(s + h) - 2.0 * l(s) >= -1e-12);
        }
    }

    #[test]
    fn omega_order_zero() {
        let p = generic();
        let v = omega_derivative(&p, 0.3, 1.7, 0);
        assert!((v - (-0.3f64).exp() * laplace_interference(&p, 1.7).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn omega_pure_exponential() {
        let p = LaplaceParams {
            c_los: 0.0,
            c_nlos: 0.0,
            alpha_los: 2.5,
            alpha_nlos: 3.5,
        };
        let a: f64 = 0.8;
        for n in 0..6 {
            let v = omega_derivative(&p, a, 3.0, n);
            let expect = a.powi(n as i32) * (-a).exp();
            assert!((v - expect).abs() < 1e-14, "n={n}: {v} vs {expect}");
        }
    }

    #[test]
    fn omega_matches_finite_differences() {
        let p = generic();
        let (a, b) = (0.4, 1.3);
        let h = 1e-4;
        let f = |x: f64| exp_g(&p, a, b, x);
        let d2 = (f(1.0 + h) - 2.0 * f(1.0) + f(1.0 - h)) / (h * h);
        let v = omega_derivative(&p, a, b, 2);
        assert!((v - d2).abs() < 1e-5 * v.abs(), "{v} vs {d2}");
        let d1 = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
        let v1 = omega_derivative(&p, a, b, 1);
        assert!((v1 + d1).abs() < 1e-6 * v1.abs());
    }
}
