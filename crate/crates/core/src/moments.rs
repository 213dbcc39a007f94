//! Moments of the continuous Poisson law and their Laplace transforms.
//!
//! Two independent routes give the moment function `m_k(λ) = E ξ_λ^k`:
//!
//! * **Volterra**: `m_k(λ) = k! ∫_0^λ e^-t μ(t, -1, k-1) dt`
//! * **tail integral**: `m_k(λ) = k ∫_0^∞ x^(k-1) (1 - F_λ(x)) dx`
//!
//! In the transform variable `s` conjugate to `λ` they become
//! `m̂_k(s) = k! / (s ln^k(1+s))`, and the family as a whole has the double
//! transform `φ̂(u, s) = ln(1+s) / (s (u + ln(1+s)))`. The numeric checks in
//! this module integrate the computed quantities and compare them with those
//! closed forms.

use serde::{Deserialize, Serialize};

use crate::distributions::{ContPoisson, ContinuousLaw, DensityRoute};
use crate::error::{Error, Result};
use crate::special::{
    factorial, integrate, integrate_pieces, reg_gamma_lower, volterra_mu_scaled, QuadratureConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentRoute {
    Volterra,
    TailIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRequest {
    pub lambda: f64,
    pub k: u32,
    pub route: MomentRoute,
}

impl MomentRequest {
    pub fn new(lambda: f64, k: u32, route: MomentRoute) -> Result<Self> {
        ContPoisson::new(lambda)?;
        if route == MomentRoute::Volterra && k == 0 {
            return Err(Error::domain("the Volterra route needs k >= 1"));
        }
        Ok(MomentRequest { lambda, k, route })
    }
}

/// `m_k(λ)`; `m_0 = 1`.
pub fn moment(req: &MomentRequest, cfg: &QuadratureConfig) -> Result<f64> {
    ContPoisson::new(req.lambda)?;
    if req.k == 0 {
        return Ok(1.0);
    }
    match req.route {
        MomentRoute::Volterra => moment_volterra(req.lambda, req.k, cfg),
        MomentRoute::TailIntegral => moment_tail(req.lambda, req.k, cfg),
    }
}

// k! ∫_0^λ e^-t μ(t, -1, k-1) dt with t = λ e^-y, so that dt = t dy and the
// t^-1 ln^-(k+1)(1/t) behaviour of μ near t = 0 turns into algebraic decay in y.
fn moment_volterra(lambda: f64, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
    let ln_lambda = lambda.ln();
    let beta = f64::from(k) - 1.0;
    let failure = std::cell::Cell::new(None);
    let integrand = |y: f64| {
        let ln_t = ln_lambda - y;
        match volterra_mu_scaled(ln_t, -1.0, beta, ln_t, cfg) {
            Ok(t_mu) => (-ln_t.exp()).exp() * t_mu,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let estimate = integrate_pieces(integrand, &[0.0, ln_lambda.max(0.0) + 1.0, f64::INFINITY], cfg);
    if let Some(e) = failure.take() {
        return Err(e.annotate("moment (Volterra route)"));
    }
    let estimate = estimate.map_err(|e| e.annotate("moment (Volterra route)"))?;
    Ok(factorial(k) * estimate.value)
}

fn moment_tail(lambda: f64, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
    let power = f64::from(k) - 1.0;
    let failure = std::cell::Cell::new(None);
    let integrand = |x: f64| match reg_gamma_lower(x, lambda) {
        Ok(0.0) => 0.0,
        Ok(tail) => x.powf(power) * tail,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let spread = 10.0 * lambda.sqrt() + 10.0;
    let points = [0.0, lambda, lambda + spread, lambda + 4.0 * spread, f64::INFINITY];
    let estimate = integrate_pieces(integrand, &points, cfg);
    if let Some(e) = failure.take() {
        return Err(e.annotate("moment (tail route)"));
    }
    let estimate = estimate.map_err(|e| e.annotate("moment (tail route)"))?;
    Ok(f64::from(k) * estimate.value)
}

/// `m̂_k(s) = k! / (s ln^k(1 + s))`.
pub fn moment_laplace(k: u32, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("moment transform requires s > 0, got {s}")));
    }
    Ok(factorial(k) / (s * s.ln_1p().powi(k as i32)))
}

/// Transform variables of `φ̂(u, s) = ∫_0^∞ e^-sλ E e^-uξ_λ dλ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleLaplacePoint {
    /// Conjugate to the random variable.
    pub u: f64,
    /// Conjugate to the intensity.
    pub s: f64,
}

impl DoubleLaplacePoint {
    pub fn new(u: f64, s: f64) -> Result<Self> {
        if !(u >= 0.0) || !u.is_finite() {
            return Err(Error::domain(format!("double transform requires u >= 0, got {u}")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("double transform requires s > 0, got {s}")));
        }
        Ok(DoubleLaplacePoint { u, s })
    }

    /// Whether `Σ (-u)^k m̂_k(s) / k!` converges (`u < ln(1 + s)`).
    pub fn in_series_region(&self) -> bool {
        self.u < self.s.ln_1p()
    }
}

pub fn double_laplace(pt: &DoubleLaplacePoint) -> Result<f64> {
    let pt = DoubleLaplacePoint::new(pt.u, pt.s)?;
    let l = pt.s.ln_1p();
    Ok(l / (pt.s * (pt.u + l)))
}

/// Closed form `1 / (s^(α+1) ln^(β+1) s)` of the Laplace transform of `μ(·, α, β)`, `s > 1`.
pub fn volterra_laplace(s: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::domain(format!("Volterra transform requires s > 1, got {s}")));
    }
    Ok((-(alpha + 1.0) * s.ln() - (beta + 1.0) * s.ln().ln()).exp())
}

/// `∫_0^∞ e^-st μ(t, α, β) dt` by nested quadrature.
///
/// `[0, 1]` is handled with `t = e^-y`, where `μ(t, -1, β)` is singular;
/// `[1, ∞)` directly.
pub fn volterra_laplace_numeric(s: f64, alpha: f64, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    crate::special::VolterraArgs::new(1.0, alpha, beta)?;
    if !(s > 1.0) {
        return Err(Error::domain(format!("Volterra transform requires s > 1, got {s}")));
    }
    let failure = std::cell::Cell::new(None);
    let record = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let near_zero = |y: f64| {
        let ln_t = -y;
        (-s * ln_t.exp()).exp() * record(volterra_mu_scaled(ln_t, alpha, beta, ln_t, cfg))
    };
    let far = |t: f64| {
        // μ(t, α, β) grows no faster than e^t times a power of ln t
        if (1.0 - s) * t + 10.0 * t.ln() < -800.0 {
            return 0.0;
        }
        record(volterra_mu_scaled(t.ln(), alpha, beta, -s * t, cfg))
    };

    let head = integrate(near_zero, 0.0, f64::INFINITY, cfg);
    let tail = integrate_pieces(far, &[1.0, 10.0, f64::INFINITY], cfg);
    if let Some(e) = failure.take() {
        return Err(e.annotate("Volterra transform"));
    }
    let head = head.map_err(|e| e.annotate("Volterra transform, t < 1"))?;
    let tail = tail.map_err(|e| e.annotate("Volterra transform, t > 1"))?;
    Ok(head.value + tail.value)
}

/// Truncation point for `∫_0^∞ e^-sλ m_k(λ) dλ`, using `m_k(λ) <= (λ + k)^k`.
pub fn laplace_cutoff(k: u32, s: f64, abs_tol: f64) -> f64 {
    let k = f64::from(k);
    let log_bound = |l: f64| -s * l + k * (l + k).ln() - s.ln();
    let target = abs_tol.max(1e-300).ln();
    let mut l = (k / s).max(1.0);
    while log_bound(l) >= target {
        l *= 1.25;
    }
    l
}

/// `∫_0^∞ e^-sλ m_k(λ) dλ`, truncated at [`laplace_cutoff`].
pub fn moment_laplace_numeric(k: u32, s: f64, route: MomentRoute, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain(format!("moment transform requires s > 0, got {s}")));
    }
    let cutoff = laplace_cutoff(k, s, cfg.abs_tol.max(cfg.tail_cutoff_tol));
    let failure = std::cell::Cell::new(None);
    let integrand = |lambda: f64| {
        let req = MomentRequest {
            lambda,
            k,
            route,
        };
        match moment(&req, cfg) {
            Ok(m) => (-s * lambda).exp() * m,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let peak = (f64::from(k) / s).min(0.5 * cutoff);
    let mut points = vec![0.0, 1.0f64.min(peak), peak, cutoff];
    points.dedup();
    let estimate = integrate_pieces(integrand, &points, cfg);
    if let Some(e) = failure.take() {
        return Err(e.annotate("moment transform"));
    }
    Ok(estimate.map_err(|e| e.annotate("moment transform"))?.value)
}

/// Partial sum `Σ_{k=0}^{terms-1} (-u)^k m̂_k(s) / k!` with caller-supplied
/// transforms `m̂_k(s)`. Only defined inside the series region.
pub fn double_laplace_series<F>(pt: &DoubleLaplacePoint, terms: u32, mut transform: F) -> Result<f64>
where
    F: FnMut(u32) -> Result<f64>,
{
    let pt = DoubleLaplacePoint::new(pt.u, pt.s)?;
    if !pt.in_series_region() {
        return Err(Error::domain(format!(
            "series diverges for u = {} >= ln(1 + s) = {}",
            pt.u,
            pt.s.ln_1p()
        )));
    }
    let mut sum = 0.0;
    for k in 0..terms {
        sum += (-pt.u).powi(k as i32) / factorial(k) * transform(k)?;
    }
    Ok(sum)
}

/// `∫_0^Λ e^-sλ ∫_0^X e^-ux f_λ(x) dx dλ` with the derivative-route density.
pub fn double_laplace_quadrature(pt: &DoubleLaplacePoint, cfg: &QuadratureConfig) -> Result<f64> {
    let pt = DoubleLaplacePoint::new(pt.u, pt.s)?;
    // inner values are at most 1
    let outer_cutoff = -(cfg.abs_tol.max(cfg.tail_cutoff_tol) * pt.s).ln() / pt.s;
    let failure = std::cell::Cell::new(None);
    let record = |e: Error| {
        failure.set(Some(e));
        f64::NAN
    };
    let inner = |lambda: f64| -> Result<f64> {
        let law = ContPoisson::new(lambda)?;
        let density = |x: f64| match law.pdf(x, DensityRoute::Derivative) {
            Ok(f) => (-pt.u * x).exp() * f,
            Err(e) => record(e),
        };
        let spread = 10.0 * lambda.sqrt() + 10.0;
        let points = [0.0, 0.5, lambda + 1.0, lambda + spread, lambda + 4.0 * spread];
        Ok(integrate_pieces(density, &points, cfg)?.value)
    };
    let outer = |lambda: f64| match inner(lambda) {
        Ok(v) => (-pt.s * lambda).exp() * v,
        Err(e) => record(e),
    };
    let estimate = integrate_pieces(outer, &[0.0, 1.0, outer_cutoff.max(2.0)], cfg);
    if let Some(e) = failure.take() {
        return Err(e.annotate("double transform quadrature"));
    }
    Ok(estimate.map_err(|e| e.annotate("double transform quadrature"))?.value)
}

/// One row of the identity battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub parameters: String,
    pub numeric: f64,
    pub closed_form: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(identity: &str, parameters: String, numeric: f64, closed_form: f64, tolerance: f64) -> Self {
        let rel_error = ((numeric - closed_form) / closed_form).abs();
        IdentityCheck {
            identity: identity.to_string(),
            parameters,
            numeric,
            closed_form,
            rel_error,
            tolerance,
            passed: rel_error <= tolerance,
        }
    }
}

/// Quadrature settings used by the identity battery.
pub fn battery_quadrature() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        max_subdivisions: 400,
        tail_cutoff_tol: 1e-14,
    }
}

pub const VOLTERRA_TRANSFORM_TOL: f64 = 1e-6;
pub const MOMENT_TRANSFORM_TOL: f64 = 1e-4;
pub const DOUBLE_TRANSFORM_TOL: f64 = 1e-3;

/// Transform of the Volterra function at `s ∈ {1.5, 2, 4}` for
/// `(α, β) ∈ {(0,0), (-1,0), (-1,1), (-1,2)}`.
pub fn volterra_transform_checks(cfg: &QuadratureConfig) -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    for (alpha, beta) in [(0.0, 0.0), (-1.0, 0.0), (-1.0, 1.0), (-1.0, 2.0)] {
        for s in [1.5, 2.0, 4.0] {
            let numeric = volterra_laplace_numeric(s, alpha, beta, cfg)?;
            let closed = volterra_laplace(s, alpha, beta)?;
            out.push(IdentityCheck::new(
                "volterra_transform",
                format!("s={s};alpha={alpha};beta={beta}"),
                numeric,
                closed,
                VOLTERRA_TRANSFORM_TOL,
            ));
        }
    }
    Ok(out)
}

/// Numeric transform of `m_k` against `k! / (s ln^k(1+s))` for
/// `k ∈ {1, 2, 3}`, `s ∈ {0.5, 1, 2}`.
pub fn moment_transform_checks(cfg: &QuadratureConfig) -> Result<Vec<IdentityCheck>> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for s in [0.5, 1.0, 2.0] {
            let numeric = moment_laplace_numeric(k, s, MomentRoute::TailIntegral, cfg)?;
            out.push(IdentityCheck::new(
                "moment_transform",
                format!("k={k};s={s}"),
                numeric,
                moment_laplace(k, s)?,
                MOMENT_TRANSFORM_TOL,
            ));
        }
    }
    Ok(out)
}

/// Terms of the series check: the remainder after `SERIES_TERMS` terms is
/// below `(u / ln(1+s))^SERIES_TERMS / (s (1 - u / ln(1+s)))`, about 1.4e-5 at
/// `(u, s) = (0.3, 1)`.
pub const SERIES_TERMS: u32 = 15;

/// The double transform at `(0.3, 1)` from the series with numerically
/// transformed moments, and at `(1, 1)` (outside the series region) by
/// two-dimensional quadrature.
pub fn double_transform_checks(cfg: &QuadratureConfig) -> Result<Vec<IdentityCheck>> {
    let inside = DoubleLaplacePoint::new(0.3, 1.0)?;
    let series = double_laplace_series(&inside, SERIES_TERMS, |k| {
        moment_laplace_numeric(k, inside.s, MomentRoute::TailIntegral, cfg)
    })?;
    let outside = DoubleLaplacePoint::new(1.0, 1.0)?;
    let quad = double_laplace_quadrature(&outside, cfg)?;
    Ok(vec![
        IdentityCheck::new(
            "double_transform_series",
            format!("u={};s={};terms={SERIES_TERMS}", inside.u, inside.s),
            series,
            double_laplace(&inside)?,
            DOUBLE_TRANSFORM_TOL,
        ),
        IdentityCheck::new(
            "double_transform_quadrature",
            format!("u={};s={}", outside.u, outside.s),
            quad,
            double_laplace(&outside)?,
            DOUBLE_TRANSFORM_TOL,
        ),
    ])
}

/// All transform identities in one table.
pub fn laplace_battery(cfg: &QuadratureConfig) -> Result<Vec<IdentityCheck>> {
    let mut all = volterra_transform_checks(cfg)?;
    all.extend(moment_transform_checks(cfg)?);
    all.extend(double_transform_checks(cfg)?);
    Ok(all)
}
