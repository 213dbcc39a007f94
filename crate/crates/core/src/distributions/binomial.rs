use serde::{Deserialize, Serialize};

use super::ContinuousLaw;
use crate::error::{Error, Result};
use crate::special::{integrate, ln_beta, ln_gamma_pos, reg_beta_pair, QuadratureConfig};

/// Continuous binomial law with `n > 0` (not necessarily an integer) and
/// `0 < p < 1`, supported on `[0, n + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContBinomial {
    n: f64,
    p: f64,
}

impl ContBinomial {
    pub fn new(n: f64, p: f64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::domain(format!("continuous binomial requires finite n > 0, got {n}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("continuous binomial requires 0 < p < 1, got {p}")));
        }
        Ok(ContBinomial { n, p })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl ContinuousLaw for ContBinomial {
    fn cdf_pair(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() {
            return Err(Error::domain(format!("CDF argument must be finite, got {x}")));
        }
        if x <= 0.0 {
            return Ok((0.0, 1.0));
        }
        let b = self.n + 1.0 - x;
        if b <= 0.0 {
            return Ok((1.0, 0.0));
        }
        // F(x) is the Beta(x, n+1-x) mass above p
        let (below, above) = reg_beta_pair(x, b, self.p)?;
        Ok((above, below))
    }

    fn support_end(&self) -> f64 {
        self.n + 1.0
    }

    /// `B(a, b)^-2 ∫_p^1 ∫_0^p (st)^(a-1) ((1-s)(1-t))^(b-1) ln(t(1-s) / (s(1-t))) ds dt`
    /// with `a = x`, `b = n + 1 - x`.
    ///
    /// Mapping `s = p exp(-y/a)` and `1 - t = (1-p) exp(-z/b)` removes the
    /// endpoint singularities at `s = 0` (for `a < 1`) and `t = 1` (for `b < 1`).
    fn pdf_double_integral(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!("density argument must be finite, got {x}")));
        }
        if x <= 0.0 || x >= self.support_end() {
            return Ok(0.0);
        }
        let (a, b, p) = (x, self.n + 1.0 - x, self.p);
        let ln_p = p.ln();
        let ln_q = (-p).ln_1p();

        let inner = |logit_t: f64| -> Result<f64> {
            let f = |y: f64| {
                let s = p * (-y / a).exp();
                let ln_one_minus_s = (-s).ln_1p();
                let logit_s = ln_p - y / a - ln_one_minus_s;
                (-y + (b - 1.0) * ln_one_minus_s).exp() * (logit_t - logit_s)
            };
            integrate(f, 0.0, f64::INFINITY, cfg).map(|e| e.value)
        };

        let failure = std::cell::Cell::new(None);
        let outer = |z: f64| {
            let one_minus_t = (1.0 - p) * (-z / b).exp();
            let ln_t = (-one_minus_t).ln_1p();
            let logit_t = ln_t - (ln_q - z / b);
            let weight = (-z + (a - 1.0) * ln_t).exp();
            if weight == 0.0 {
                return 0.0;
            }
            match inner(logit_t) {
                Ok(v) => weight * v,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        let outer_value = integrate(outer, 0.0, f64::INFINITY, cfg);
        if let Some(e) = failure.take() {
            return Err(e.annotate("continuous binomial density, inner integral"));
        }
        let outer_value = outer_value.map_err(|e| e.annotate("continuous binomial density"))?.value;
        let log_front = a * ln_p + b * ln_q - a.ln() - b.ln() - 2.0 * ln_beta(a, b);
        Ok(log_front.exp() * outer_value)
    }

    /// `Γ(n+1) / (Γ(x+1) Γ(n-x+1)) p^x (1-p)^(n-x)` for `0 <= x <= n`.
    fn interval_mass(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x <= self.n) {
            return Err(Error::domain(format!(
                "binomial interval mass requires 0 <= x <= n = {}, got {x}",
                self.n
            )));
        }
        let log_mass = ln_gamma_pos(self.n + 1.0) - ln_gamma_pos(x + 1.0) - ln_gamma_pos(self.n - x + 1.0)
            + x * self.p.ln()
            + (self.n - x) * (-self.p).ln_1p();
        Ok(log_mass.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DensityRoute;

    #[test]
    fn parameter_validation() {
        assert!(ContBinomial::new(0.0, 0.5).is_err());
        assert!(ContBinomial::new(3.0, 0.0).is_err());
        assert!(ContBinomial::new(3.0, 1.0).is_err());
        assert!(ContBinomial::new(2.5, 0.4).is_ok());
    }

    #[test]
    fn cdf_edges() {
        let d = ContBinomial::new(1.0, 0.3).unwrap();
        assert!((d.cdf(1.0).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(d.cdf(0.0).unwrap(), 0.0);
        assert_eq!(d.cdf(2.0).unwrap(), 1.0);
        assert_eq!(d.cdf(5.0).unwrap(), 1.0);
    }

    #[test]
    fn cdf_non_integer_n() {
        // 30-digit quadrature of the two incomplete-beta integrals
        let d = ContBinomial::new(2.5, 0.4).unwrap();
        let got = d.cdf(1.25).unwrap();
        assert!((got - 0.396_584_771_875_916_375_6).abs() < 1e-13, "{got}");
    }

    #[test]
    fn density_reference_value() {
        let d = ContBinomial::new(3.0, 0.25).unwrap();
        let want = 0.433_669_446_072_744_322_5;
        for route in [DensityRoute::Derivative, DensityRoute::DoubleIntegral] {
            let got = d.pdf(1.5, route).unwrap();
            assert!(((got - want) / want).abs() < 1e-8, "{route:?}: {got}");
        }
    }

    #[test]
    fn density_zero_outside() {
        let d = ContBinomial::new(3.0, 0.25).unwrap();
        for route in [DensityRoute::Derivative, DensityRoute::DoubleIntegral] {
            assert_eq!(d.pdf(-0.5, route).unwrap(), 0.0);
            assert_eq!(d.pdf(4.0, route).unwrap(), 0.0);
            assert_eq!(d.pdf(7.0, route).unwrap(), 0.0);
        }
    }

    #[test]
    fn interval_mass_edges() {
        let d = ContBinomial::new(1.0, 0.35).unwrap();
        assert!((d.interval_mass(0.0).unwrap() - 0.65).abs() < 1e-15);
        assert!(d.interval_mass(1.5).is_err());
        assert!(d.interval_mass(-1e-9).is_err());
    }
}
