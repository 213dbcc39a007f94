use serde::{Deserialize, Serialize};

use super::ContinuousLaw;
use crate::error::{Error, Result};
use crate::special::{integrate, integrate_pieces, ln_gamma_pos, reg_gamma_pair, QuadratureConfig};

/// Continuous Poisson law with intensity `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContPoisson {
    lambda: f64,
}

impl ContPoisson {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::domain(format!(
                "continuous Poisson requires finite lambda > 0, got {lambda}"
            )));
        }
        Ok(ContPoisson { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl ContinuousLaw for ContPoisson {
    fn cdf_pair(&self, x: f64) -> Result<(f64, f64)> {
        if !x.is_finite() {
            return Err(Error::domain(format!("CDF argument must be finite, got {x}")));
        }
        if x <= 0.0 {
            return Ok((0.0, 1.0));
        }
        // F(x) = Q(x, λ); the complement is the regularized lower function
        let (lower, upper) = reg_gamma_pair(x, self.lambda)?;
        Ok((upper, lower))
    }

    fn support_end(&self) -> f64 {
        f64::INFINITY
    }

    fn initial_bracket(&self) -> f64 {
        self.lambda + 1.0
    }

    /// `Γ(x)^-2 ∫_λ^∞ ∫_0^λ e^-(s+t) (st)^(x-1) ln(t/s) ds dt`.
    ///
    /// The inner variable is mapped by `s = λ exp(-y/x)`, which absorbs the
    /// `s^(x-1)` endpoint singularity for `x < 1`.
    fn pdf_double_integral(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!("density argument must be finite, got {x}")));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        let lambda = self.lambda;
        let ln_lambda = lambda.ln();
        let ln_gamma_x = ln_gamma_pos(x);

        // ∫_0^λ e^-s s^(x-1) ln(t/s) ds, without the factor λ^x / x
        let inner = |ln_t_over_lambda: f64| -> Result<f64> {
            let f = |y: f64| {
                let s = lambda * (-y / x).exp();
                (-y - s).exp() * (ln_t_over_lambda + y / x)
            };
            integrate(f, 0.0, f64::INFINITY, cfg).map(|e| e.value)
        };

        let failure = std::cell::Cell::new(None);
        let outer = |t: f64| {
            let weight = (-t + (x - 1.0) * t.ln() - ln_gamma_x).exp();
            if weight == 0.0 {
                return 0.0;
            }
            match inner(t.ln() - ln_lambda) {
                Ok(v) => weight * v,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        let mode = lambda.max(x - 1.0);
        let width = 10.0 * x.max(1.0).sqrt() + 10.0;
        let mut points = vec![lambda, mode, mode + width, f64::INFINITY];
        points.dedup();
        let outer_value = integrate_pieces(outer, &points, cfg);
        if let Some(e) = failure.take() {
            return Err(e.annotate("continuous Poisson density, inner integral"));
        }
        let outer_value = outer_value.map_err(|e| e.annotate("continuous Poisson density"))?.value;
        let log_front = x * ln_lambda - x.ln() - ln_gamma_x;
        Ok(log_front.exp() * outer_value)
    }

    /// `e^-λ λ^x / Γ(x + 1)`.
    fn interval_mass(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(format!("interval mass requires finite x >= 0, got {x}")));
        }
        Ok((-self.lambda + x * self.lambda.ln() - ln_gamma_pos(x + 1.0)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DensityRoute;

    #[test]
    fn rejects_bad_lambda() {
        assert!(ContPoisson::new(0.0).is_err());
        assert!(ContPoisson::new(-2.0).is_err());
        assert!(ContPoisson::new(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_simple_values() {
        let d = ContPoisson::new(1.0).unwrap();
        assert!((d.cdf(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(d.cdf(-3.0).unwrap(), 0.0);
        assert_eq!(d.cdf(0.0).unwrap(), 0.0);
        assert!((d.cdf(0.5).unwrap() - 0.157_299_207_050_285_13).abs() < 1e-14);
        assert!(d.cdf(f64::NAN).is_err());
    }

    #[test]
    fn density_zero_off_support() {
        let d = ContPoisson::new(3.0).unwrap();
        for route in [DensityRoute::Derivative, DensityRoute::DoubleIntegral] {
            assert_eq!(d.pdf(-1.0, route).unwrap(), 0.0);
            assert_eq!(d.pdf(0.0, route).unwrap(), 0.0);
        }
    }

    #[test]
    fn density_reference_value() {
        // derivative of the 30-digit quadrature CDF at x = 1, lambda = 1
        let d = ContPoisson::new(1.0).unwrap();
        let want = 0.431_729_710_634_898_696;
        for route in [DensityRoute::Derivative, DensityRoute::DoubleIntegral] {
            let got = d.pdf(1.0, route).unwrap();
            assert!(((got - want) / want).abs() < 1e-8, "{route:?}: {got}");
        }
    }

    #[test]
    fn interval_mass_at_zero() {
        let d = ContPoisson::new(2.5).unwrap();
        assert!((d.interval_mass(0.0).unwrap() - (-2.5f64).exp()).abs() < 1e-16);
        assert!(d.interval_mass(-0.1).is_err());
    }
}
