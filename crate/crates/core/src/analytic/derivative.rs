//! Higher derivatives of `exp(G(x))` from the derivatives of `G`.
//!
//! With `f = exp(G)` we have `f' = f G'`, and Leibniz gives
//! `f^(n) = sum_{i<n} C(n-1, i) f^(i) G^(n-i)`, which is the complete Bell
//! polynomial recursion in the derivatives of `G`.

/// Returns `[f, f', ..., f^(n)]` at a point where `f = value` and
/// `g_derivs[m] = G^(m)` for `m = 1..=n` (`g_derivs[0]` is ignored).
pub(crate) fn exp_derivatives(value: f64, g_derivs: &[f64], n: usize) -> Vec<f64> {
    assert!(g_derivs.len() > n, "need derivatives of G up to order {n}");
    let mut out = Vec::with_capacity(n + 1);
    out.push(value);
    for order in 1..=n {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for i in 0..order {
            acc += binom * out[i] * g_derivs[order - i];
            binom = binom * (order - 1 - i) as f64 / (i + 1) as f64;
        }
        out.push(acc);
    }
    out
}

/// Falling factorial `beta (beta - 1) ... (beta - m + 1)`.
pub(crate) fn falling_factorial(beta: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (beta - i as f64))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}
