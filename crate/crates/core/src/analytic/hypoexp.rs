//! CDF of a sum of independent exponentials with possibly repeated means.
//!
//! Partial fractions of the transform `prod (1 + mu_k s)^-o_k / s` give the
//! survival function
//!
//! ```text
//! 1 - F(z) = sum_k e^{-z/mu_k} sum_{n < o_k} c_{k,n} (z/mu_k)^n
//! ```
//!
//! The coefficients are derivatives, at `tau = -1`, of
//! `chi_k(tau) = tau^-1 prod_{j != k} (r_j / (r_j + tau))^{o_j}` with
//! `r_j = mu_k / mu_j`. Working in the rescaled variable keeps every
//! coefficient dimensionless regardless of how small the means are.

use super::derivative::{exp_derivatives, factorial};
use crate::scenario::HypoexpSpec;

#[derive(Debug, Clone)]
pub(crate) struct ExponentialBlock {
    pub mean: f64,
    /// `coeffs[n]` multiplies `(z/mean)^n e^{-z/mean}`.
    pub coeffs: Vec<f64>,
}

/// Precomputed partial-fraction expansion of a hypoexponential law.
#[derive(Debug, Clone)]
pub struct HypoexpCdf {
    blocks: Vec<ExponentialBlock>,
}

impl HypoexpCdf {
    pub fn new(spec: &HypoexpSpec) -> Self {
        let means = spec.distinct_means();
        let mult = spec.multiplicities();
        let blocks = (0..means.len())
            .map(|k| ExponentialBlock {
                mean: means[k],
                coeffs: block_coefficients(means, mult, k),
            })
            .collect();
        HypoexpCdf { blocks }
    }

    pub(crate) fn blocks(&self) -> &[ExponentialBlock] {
        &self.blocks
    }

    pub fn survival(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        self.blocks
            .iter()
            .map(|b| {
                let u = z / b.mean;
                let poly = b.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c);
                poly * (-u).exp()
            })
            .sum()
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        (1.0 - self.survival(z)).clamp(0.0, 1.0)
    }
}

/// `c_{k,n}` for `n = 0..o_k`.
fn block_coefficients(means: &[f64], mult: &[u32], k: usize) -> Vec<f64> {
    let ok = mult[k] as usize;
    let ratios: Vec<(f64, f64)> = means
        .iter()
        .zip(mult)
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, (&mu_j, &o_j))| (means[k] / mu_j, o_j as f64))
        .collect();

    // chi(-1) = -prod (r_j / (r_j - 1))^{o_j}, assembled in log space.
    let mut log_mag = 0.0;
    let mut sign = -1.0;
    for &(r, o) in &ratios {
        log_mag += o * (r.ln() - (r - 1.0).abs().ln());
        if r < 1.0 && (o as u32) % 2 == 1 {
            sign = -sign;
        }
    }
    let chi0 = sign * log_mag.exp();

    // log-derivative h = -1/tau - sum o_j / (r_j + tau) and its derivatives
    // at tau = -1; slot m of the array feeds exp_derivatives as h^(m-1).
    let mut h = vec![0.0; ok];
    for (m, slot) in h.iter_mut().enumerate().skip(1) {
        let q = m - 1;
        let sgn = if q % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^{q+1}
        let tau_term = if q % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^{-(q+1)}
        let sum: f64 = ratios
            .iter()
            .map(|&(r, o)| o * (r - 1.0).powi(-(q as i32) - 1))
            .sum();
        *slot = sgn * factorial(q) * (tau_term + sum);
    }
    let chi = exp_derivatives(chi0, &h, ok - 1);

    // c_{k,l} = -chi^(l-1)(-1) / ((l-1)! (o_k - l)!), stored at n = o_k - l.
    let mut coeffs = vec![0.0; ok];
    for l in 1..=ok {
        coeffs[ok - l] = -chi[l - 1] / (factorial(l - 1) * factorial(ok - l));
    }
    coeffs
}

pub fn hypoexp_cdf(spec: &HypoexpSpec, z: f64) -> f64 {
    HypoexpCdf::new(spec).cdf(z)
}
