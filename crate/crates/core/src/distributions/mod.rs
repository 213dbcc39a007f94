//! Continuous counterparts of the Poisson and binomial laws.
//!
//! | Law | Support | CDF for `x` inside the support |
//! |---|---|---|
//! | [`ContPoisson`] (λ) | `[0, ∞)` | `Γ(x, λ) / Γ(x)` |
//! | [`ContBinomial`] (N, p) | `[0, N+1]` | `B(x, N+1-x, p) / B(x, N+1-x)` |
//!
//! Both CDFs are continuous and strictly increasing on the support, and their
//! interval masses over `[x, x+1)` have closed forms (see
//! [`ContinuousLaw::interval_mass`]). At non-negative integers they agree with
//! the CDFs (`P(X < x)`) of the classical Poisson and binomial laws, which are
//! provided in [`classical`] as reference implementations.

mod binomial;
pub mod classical;
mod poisson;

pub use binomial::ContBinomial;
pub use poisson::ContPoisson;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::special::QuadratureConfig;

/// How a density is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityRoute {
    /// Richardson-extrapolated central difference of the CDF.
    Derivative,
    /// Direct two-dimensional quadrature of the quotient-rule derivative.
    DoubleIntegral,
}

/// Quadrature settings for the double-integral densities; both nested levels
/// use them.
pub fn density_quadrature() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_subdivisions: 400,
        tail_cutoff_tol: 1e-16,
    }
}

/// Operations shared by the two continuous laws.
pub trait ContinuousLaw {
    /// `P(X < x)`.
    fn cdf(&self, x: f64) -> Result<f64> {
        self.cdf_pair(x).map(|(lower, _)| lower)
    }

    /// `(P(X < x), P(X >= x))`, each computed so that the smaller one keeps
    /// full relative precision.
    fn cdf_pair(&self, x: f64) -> Result<(f64, f64)>;

    /// Right end of the support (`+inf` for the Poisson counterpart).
    fn support_end(&self) -> f64;

    /// Upper end of the first quantile bracket `[0, initial_bracket]`; it is
    /// doubled until it encloses the requested level.
    fn initial_bracket(&self) -> f64 {
        self.support_end()
    }

    fn pdf_double_integral(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64>;

    fn pdf(&self, x: f64, route: DensityRoute) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!("density argument must be finite, got {x}")));
        }
        if x <= 0.0 || x >= self.support_end() {
            return Ok(0.0);
        }
        match route {
            DensityRoute::Derivative => finite_difference_density(self, x),
            DensityRoute::DoubleIntegral => self.pdf_double_integral(x, &density_quadrature()),
        }
    }

    /// Closed-form mass of `[x, x + 1)`.
    fn interval_mass(&self, x: f64) -> Result<f64>;

    /// Smallest `x` with `cdf(x) = q` up to `1e-10`.
    fn quantile(&self, q: f64) -> Result<f64> {
        invert_cdf(self, q)
    }

    /// `count` inverse-CDF draws, one per consecutive uniform of `stream`.
    fn sample(&self, stream: &RandomStream, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::domain("sample count must be positive"));
        }
        stream
            .uniforms(count)
            .into_iter()
            .map(|u| self.quantile(u))
            .collect()
    }
}

/// Central difference of the CDF, extrapolated once.
///
/// The stencil differences whichever tail is smaller at `x`, so that the
/// relative rounding error does not blow up where the CDF is close to 1.
fn finite_difference_density<L: ContinuousLaw + ?Sized>(law: &L, x: f64) -> Result<f64> {
    let room = x.min(law.support_end() - x);
    let h = 1e-5f64.max(1e-7 * x).min(0.5 * room);
    let (lower, upper) = law.cdf_pair(x)?;
    let use_upper = upper < lower;
    let tail = |z: f64| -> Result<f64> {
        let (lo, up) = law.cdf_pair(z)?;
        Ok(if use_upper { -up } else { lo })
    };
    let central = |step: f64| -> Result<f64> { Ok((tail(x + step)? - tail(x - step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(((4.0 * fine - coarse) / 3.0).max(0.0))
}

const BISECTION_WIDTH: f64 = 1e-12;

fn invert_cdf<L: ContinuousLaw + ?Sized>(law: &L, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("quantile level must lie in [0, 1], got {q}")));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    let end = law.support_end();
    if q == 1.0 {
        return Ok(end);
    }

    let mut lo = 0.0;
    let mut hi = law.initial_bracket();
    while law.cdf(hi)? < q {
        if hi >= end {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(end);
        if !hi.is_finite() {
            return Err(Error::convergence("quantile bracket", lo, f64::INFINITY));
        }
    }

    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if law.cdf(mid)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // safeguarded Newton polish: stay inside the bracket, keep improvements only
    let mut x = 0.5 * (lo + hi);
    let mut residual = law.cdf(x)? - q;
    for _ in 0..2 {
        let density = finite_difference_density(law, x)?;
        if density <= 0.0 || residual == 0.0 {
            break;
        }
        let candidate = x - residual / density;
        if !(candidate >= lo && candidate <= hi) {
            break;
        }
        let r = law.cdf(candidate)? - q;
        if r.abs() < residual.abs() {
            x = candidate;
            residual = r;
        } else {
            break;
        }
    }
    Ok(x)
}

/// Either continuous law, for callers that pick the family at run time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Law {
    Poisson(ContPoisson),
    Binomial(ContBinomial),
}

impl Law {
    fn inner(&self) -> &dyn ContinuousLaw {
        match self {
            Law::Poisson(d) => d,
            Law::Binomial(d) => d,
        }
    }
}

impl ContinuousLaw for Law {
    fn cdf_pair(&self, x: f64) -> Result<(f64, f64)> {
        self.inner().cdf_pair(x)
    }
    fn support_end(&self) -> f64 {
        self.inner().support_end()
    }
    fn initial_bracket(&self) -> f64 {
        self.inner().initial_bracket()
    }
    fn pdf_double_integral(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.inner().pdf_double_integral(x, cfg)
    }
    fn interval_mass(&self, x: f64) -> Result<f64> {
        self.inner().interval_mass(x)
    }
}
