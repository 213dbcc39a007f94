//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! The 21-point Kronrod rule with its embedded 10-point Gauss rule is applied
//! to every interval; the interval with the largest error estimate is bisected
//! until the summed estimate meets `max(abs_tol, rel_tol * |value|)`. The error
//! heuristic is the one used by QUADPACK (`qk21`). Semi-infinite ranges are
//! folded onto `(0, 1]` with `x = a + (1 - u) / u`.

#![allow(clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the number of interval bisections.
    pub max_subdivisions: usize,
    /// Mass threshold used when an infinite range has to be truncated.
    pub tail_cutoff_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 200,
            tail_cutoff_tol: 1e-14,
        }
    }
}

impl QuadratureConfig {
    /// A configuration with the given tolerances and the default limits.
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureConfig {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tol_ok = |t: f64| t.is_finite() && t >= 0.0;
        if !tol_ok(self.abs_tol) || !tol_ok(self.rel_tol) {
            return Err(Error::domain("quadrature tolerances must be finite and non-negative"));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::domain("abs_tol and rel_tol cannot both be zero"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if !(self.tail_cutoff_tol > 0.0 && self.tail_cutoff_tol.is_finite()) {
            return Err(Error::domain("tail_cutoff_tol must be positive"));
        }
        Ok(())
    }

    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_696_325_380,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_gauss = 0.0;
    let mut res_kronrod = WGK[10] * fc;
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..5 {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[k] = f1;
        fv2[k] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[k] = f1;
        fv2[k] = f2;
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for k in 0..10 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let value = res_kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_kronrod - res_gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Estimate { value, error }
}

#[derive(Debug, Clone, Copy)]
enum Segment {
    Finite,
    /// `[origin, +inf)` mapped onto `u in (0, 1]`.
    Tail { origin: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    segment: Segment,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

fn evaluate<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, segment: Segment) -> Piece {
    let est = match segment {
        Segment::Finite => gauss_kronrod_21(f, lo, hi),
        Segment::Tail { origin } => {
            let mapped = |u: f64| {
                let x = origin + (1.0 - u) / u;
                if x.is_finite() {
                    f(x) / (u * u)
                } else {
                    0.0
                }
            };
            gauss_kronrod_21(&mapped, lo, hi)
        }
    };
    Piece {
        lo,
        hi,
        segment,
        est,
    }
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`.
///
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// allowed.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    integrate_pieces(f, &[a, b], cfg)
}

/// Integrate over consecutive pieces `[p0, p1], [p1, p2], ...` under a single
/// global error budget. The last breakpoint may be `f64::INFINITY`. Placing
/// breakpoints at peaks or kinks of the integrand helps the error control.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    if points.len() < 2 {
        return Err(Error::domain("need at least two breakpoints"));
    }
    let last = points.len() - 1;
    for (i, w) in points.windows(2).enumerate() {
        let ok_lo = w[0].is_finite();
        let ok_hi = w[1].is_finite() || (i + 1 == last && w[1] == f64::INFINITY);
        if !ok_lo || !ok_hi || w[1] < w[0] {
            return Err(Error::domain(format!(
                "invalid integration range [{}, {}]",
                w[0], w[1]
            )));
        }
    }

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let piece = if w[1].is_infinite() {
            evaluate(&f, 0.0, 1.0, Segment::Tail { origin: w[0] })
        } else {
            evaluate(&f, w[0], w[1], Segment::Finite)
        };
        heap.push(piece);
    }

    let totals = |heap: &BinaryHeap<Piece>| {
        heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.est.value, e + p.est.error))
    };

    let (mut value, mut error) = totals(&heap);
    let mut bisections = 0;
    while error > cfg.tolerance_for(value) {
        if bisections >= cfg.max_subdivisions {
            return Err(Error::convergence("integrate", value, error));
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // interval at machine resolution; nothing left to refine
            heap.push(worst);
            return Err(Error::convergence("integrate", value, error));
        }
        heap.push(evaluate(&f, worst.lo, mid, worst.segment));
        heap.push(evaluate(&f, mid, worst.hi, worst.segment));
        bisections += 1;
        // resum rather than update incrementally to avoid drift
        (value, error) = totals(&heap);
    }

    if !value.is_finite() || !error.is_finite() {
        return Err(Error::convergence("integrate", value, error));
    }
    Ok(Estimate { value, error })
}
