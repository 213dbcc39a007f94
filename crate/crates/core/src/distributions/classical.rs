//! Classical Poisson and binomial CDFs by direct summation.
//!
//! Both return `P(X < x)`, the convention under which they coincide with the
//! continuous counterparts at positive integers.

use crate::error::{Error, Result};
use crate::special::ln_gamma_pos;

fn log_sum_exp(logs: impl Iterator<Item = f64>) -> f64 {
    let logs: Vec<f64> = logs.collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// `e^-λ Σ_{k < ceil(x)} λ^k / k!`, and 0 for `x <= 0`.
pub fn classical_poisson_cdf(lambda: f64, x: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("Poisson requires finite lambda > 0, got {lambda}")));
    }
    if x.is_nan() {
        return Err(Error::domain("Poisson CDF argument is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let terms = x.ceil() as u64;
    let ln_lambda = lambda.ln();
    let log_cdf = log_sum_exp((0..terms).map(|k| {
        let k = k as f64;
        -lambda + k * ln_lambda - ln_gamma_pos(k + 1.0)
    }));
    Ok(log_cdf.exp().min(1.0))
}

/// `Σ_{k < ceil(x)} C(n, k) p^k (1-p)^(n-k)`; 0 for `x <= 0`, 1 for `x > n`.
pub fn classical_binomial_cdf(n: u64, p: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("binomial requires n >= 1"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("binomial requires 0 < p < 1, got {p}")));
    }
    if x.is_nan() {
        return Err(Error::domain("binomial CDF argument is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    if x > nf {
        return Ok(1.0);
    }
    let terms = x.ceil() as u64;
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let ln_n_fact = ln_gamma_pos(nf + 1.0);
    let log_cdf = log_sum_exp((0..terms).map(|k| {
        let k = k as f64;
        ln_n_fact - ln_gamma_pos(k + 1.0) - ln_gamma_pos(nf - k + 1.0) + k * ln_p + (nf - k) * ln_q
    }));
    Ok(log_cdf.exp().min(1.0))
}
