//! Regularized incomplete beta function.

use super::gamma::ln_gamma_pos;
use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;

/// `ln B(a, b)` for positive arguments.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b)
}

/// Regularized pair `(I_p(a, b), 1 - I_p(a, b))`, i.e. the mass of the
/// Beta(a, b) law below and above `p`.
///
/// The continued fraction is evaluated on whichever side converges quickly
/// (`I_p(a, b) = 1 - I_{1-p}(b, a)`), and that side is returned directly.
pub fn reg_beta_pair(a: f64, b: f64, p: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!(
            "incomplete beta requires finite a, b > 0, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("incomplete beta requires p in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok((0.0, 1.0));
    }
    if p == 1.0 {
        return Ok((1.0, 0.0));
    }
    // closed forms: I_p(a, 1) = p^a and 1 - I_p(1, b) = (1-p)^b
    if a == 1.0 {
        let upper = (1.0 - p).powf(b);
        let lower = if upper > 0.5 { -(b * (-p).ln_1p()).exp_m1() } else { 1.0 - upper };
        return Ok((lower, upper));
    }
    if b == 1.0 {
        let lower = p.powf(a);
        let upper = if lower > 0.5 { -(a * p.ln()).exp_m1() } else { 1.0 - lower };
        return Ok((lower, upper));
    }
    let log_front = a * p.ln() + b * (-p).ln_1p() - ln_beta(a, b);
    if p < (a + 1.0) / (a + b + 2.0) {
        let lower = ((continued_fraction(a, b, p)?).ln() + log_front).exp() / a;
        let lower = lower.min(1.0);
        Ok((lower, 1.0 - lower))
    } else {
        let upper = ((continued_fraction(b, a, 1.0 - p)?).ln() + log_front).exp() / b;
        let upper = upper.min(1.0);
        Ok((1.0 - upper, upper))
    }
}

/// `B(x, y, p) / B(x, y)` where `B(x, y, p)` integrates over `[p, 1]`.
pub fn reg_beta_upper(x: f64, y: f64, p: f64) -> Result<f64> {
    reg_beta_pair(x, y, p).map(|(_, upper)| upper)
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::convergence("incomplete beta continued fraction", h, f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_case() {
        for p in [0.0, 0.1, 0.3, 0.77, 1.0] {
            assert!((reg_beta_upper(1.0, 1.0, p).unwrap() - (1.0 - p)).abs() < 1e-15);
        }
    }

    #[test]
    fn complete_integral() {
        for (x, y) in [(0.3, 2.0), (5.0, 0.01), (150.0, 80.0)] {
            assert_eq!(reg_beta_upper(x, y, 0.0).unwrap(), 1.0);
            assert_eq!(reg_beta_upper(x, y, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_density() {
        assert!((reg_beta_upper(2.0, 1.0, 0.5).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn symmetry() {
        for &(a, b, p) in &[(0.4, 3.0, 0.2), (12.0, 7.5, 0.6), (200.0, 1e-3, 0.999)] {
            let lhs = reg_beta_upper(a, b, p).unwrap();
            let rhs = 1.0 - reg_beta_upper(b, a, 1.0 - p).unwrap();
            assert!((lhs - rhs).abs() < 1e-13, "{a} {b} {p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn decreasing_in_p() {
        let mut prev = 1.0;
        for i in 1..100 {
            let v = reg_beta_upper(3.5, 2.25, i as f64 / 100.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(reg_beta_upper(0.0, 1.0, 0.5).is_err());
        assert!(reg_beta_upper(1.0, -1.0, 0.5).is_err());
        assert!(reg_beta_upper(1.0, 1.0, 1.5).is_err());
        assert!(reg_beta_upper(1.0, 1.0, f64::NAN).is_err());
    }
}
