//! Volterra functions
//!
//! ```text
//! mu(t, a, b) = ∫_0^∞ t^(x+a) x^b / (Γ(b+1) Γ(x+a+1)) dx,    nu(t) = mu(t, 0, 0)
//! ```
//!
//! The integrand is log-concave in `x` (for `a >= -1`, `b > -1`), so it has a
//! single peak and decays super-exponentially beyond it. The infinite range is
//! cut where the envelope `x * integrand(x)` has fallen below
//! `tail_cutoff_tol` relative to its maximum, and that point is doubled.

use serde::{Deserialize, Serialize};

use super::gamma::ln_gamma_pos;
use super::quadrature::{integrate_pieces, QuadratureConfig};
use crate::error::{Error, Result};

/// Arguments of `mu(t, alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraArgs {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl VolterraArgs {
    pub fn new(t: f64, alpha: f64, beta: f64) -> Result<Self> {
        let args = VolterraArgs { t, alpha, beta };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::domain(format!("Volterra mu requires finite t >= 0, got {}", self.t)));
        }
        if !(self.beta > -1.0) || !self.beta.is_finite() {
            return Err(Error::domain(format!("Volterra mu requires beta > -1, got {}", self.beta)));
        }
        if !(self.alpha >= -1.0) || !self.alpha.is_finite() {
            return Err(Error::domain(format!(
                "Volterra mu is supported for alpha >= -1 only, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

// Guard against runaway searches for the truncation point.
const SAFETY_BOUND: f64 = 1e8;

/// `mu(t, alpha, beta)`.
///
/// At `t = 0` the value is 0 for `alpha >= 0` and `+inf` for `alpha < 0`
/// (the integrand is infinite on `0 < x < -alpha`).
pub fn volterra_mu(args: VolterraArgs, cfg: &QuadratureConfig) -> Result<f64> {
    args.validate()?;
    if args.t == 0.0 {
        return Ok(if args.alpha < 0.0 { f64::INFINITY } else { 0.0 });
    }
    volterra_mu_scaled(args.t.ln(), args.alpha, args.beta, 0.0, cfg)
}

/// `nu(t) = mu(t, 0, 0)`.
pub fn volterra_nu(t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    volterra_mu(VolterraArgs::new(t, 0.0, 0.0)?, cfg)
}

/// `exp(log_scale) * mu(exp(ln_t), alpha, beta)`, evaluated without forming
/// `t` or the unscaled value. Arguments are assumed validated.
///
/// This is the form needed near `t = 0`, where `mu(t, -1, beta)` blows up like
/// `1 / (t ln^(beta+2)(1/t))` and only `t * mu` stays representable.
pub(crate) fn volterra_mu_scaled(
    ln_t: f64,
    alpha: f64,
    beta: f64,
    log_scale: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let shift = alpha + 1.0;
    let constant = alpha * ln_t + log_scale - ln_gamma_pos(beta + 1.0);
    let log_integrand = |x: f64| x * ln_t + beta * x.ln() + constant - ln_gamma_pos(x + shift);
    let log_envelope = |x: f64| x.ln() + log_integrand(x);

    let peak = locate_peak(&log_envelope)?;
    let cutoff = truncation_point(&log_envelope, peak, cfg.tail_cutoff_tol)?;

    let integrand = |x: f64| {
        let v = log_integrand(x);
        if v.is_nan() {
            0.0
        } else {
            v.exp()
        }
    };
    let mut points = vec![0.0, peak, cutoff, 2.0 * cutoff];
    points.dedup();
    integrate_pieces(integrand, &points, cfg)
        .map(|e| e.value)
        .map_err(|e| e.annotate("volterra_mu"))
}

/// Maximiser of a concave function on `(0, inf)` that tends to `-inf` at 0.
fn locate_peak(g: &impl Fn(f64) -> f64) -> Result<f64> {
    let mut hi = 1.0;
    while g(2.0 * hi) >= g(hi) {
        hi *= 2.0;
        if hi > SAFETY_BOUND {
            return Err(Error::convergence("volterra peak search", hi, f64::INFINITY));
        }
    }
    hi *= 2.0;

    // golden-section search; the peak may sit many decades below `hi`
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, hi);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..2000 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest `x > peak` where `g` has dropped by `ln(1/tol)` from `g(peak)`.
fn truncation_point(g: &impl Fn(f64) -> f64, peak: f64, tol: f64) -> Result<f64> {
    let target = g(peak) + tol.ln();
    let mut step = peak.max(f64::MIN_POSITIVE);
    while g(peak + step) >= target {
        step *= 2.0;
        if step > SAFETY_BOUND {
            return Err(Error::convergence("volterra truncation search", peak + step, f64::INFINITY));
        }
    }
    let (mut lo, mut hi) = (peak + 0.5 * step, peak + step);
    if g(lo) < target {
        lo = peak;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) || hi - lo <= 1e-6 * hi {
            break;
        }
        if g(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadratureConfig {
        QuadratureConfig::with_tolerances(0.0, 1e-12)
    }

    #[test]
    fn zero_argument() {
        let cfg = QuadratureConfig::default();
        assert_eq!(volterra_nu(0.0, &cfg).unwrap(), 0.0);
        let args = VolterraArgs::new(0.0, -1.0, 0.0).unwrap();
        assert_eq!(volterra_mu(args, &cfg).unwrap(), f64::INFINITY);
    }

    #[test]
    fn nu_of_one_and_two() {
        // 30-digit quadrature of ∫ t^x / Γ(x+1) dx
        let nu1 = volterra_nu(1.0, &tight()).unwrap();
        assert!((nu1 - 2.266_534_507_699_848_835).abs() < 1e-11, "{nu1}");
        let nu2 = volterra_nu(2.0, &tight()).unwrap();
        assert!((nu2 - 6.997_579_629_175_669_216).abs() < 1e-10, "{nu2}");
    }

    #[test]
    fn mu_reference_values() {
        let v = volterra_mu(VolterraArgs::new(2.0, -1.0, 1.0).unwrap(), &tight()).unwrap();
        assert!((v - 22.161_199_664_008_185_056).abs() < 1e-9, "{v}");
        let v = volterra_mu(VolterraArgs::new(0.5, -1.0, 0.0).unwrap(), &tight()).unwrap();
        assert!((v - 1.828_601_750_962_636_134).abs() < 1e-11, "{v}");
    }

    #[test]
    fn scaled_form_matches_plain_form() {
        let cfg = tight();
        for t in [0.01, 0.4, 3.0, 25.0] {
            let plain = volterra_mu(VolterraArgs::new(t, -1.0, 2.0).unwrap(), &cfg).unwrap();
            let scaled = volterra_mu_scaled(t.ln(), -1.0, 2.0, t.ln(), &cfg).unwrap();
            assert!((scaled - t * plain).abs() <= 1e-11 * scaled.abs(), "t={t}");
        }
    }

    #[test]
    fn scaled_form_far_below_underflow() {
        // t * mu(t, -1, 0) ~ 1/y^2 for t = e^-y, y large
        let y: f64 = 1e6;
        let v = volterra_mu_scaled(-y, -1.0, 0.0, -y, &tight()).unwrap();
        assert!((v * y * y - 1.0).abs() < 1e-4, "{}", v * y * y);
    }

    #[test]
    fn nu_monotone_beyond_one() {
        let cfg = QuadratureConfig::default();
        let ts = [1.0, 1.5, 2.0, 4.0, 9.0, 20.0];
        let vals: Vec<f64> = ts.iter().map(|&t| volterra_nu(t, &cfg).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    }

    #[test]
    fn argument_validation() {
        assert!(VolterraArgs::new(1.0, 0.0, -1.0).is_err());
        assert!(VolterraArgs::new(1.0, -1.5, 0.0).is_err());
        assert!(VolterraArgs::new(-1.0, 0.0, 0.0).is_err());
        assert!(VolterraArgs::new(1.0, 0.0, -0.5).is_ok());
    }
}
