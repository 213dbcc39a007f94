//! Binomial to Poisson convergence of the continuous laws.
//!
//! For a schedule of `N` values with `p = p(N)` and `N p -> λ`, the continuous
//! binomial CDF and its unit-interval masses are compared with those of the
//! continuous Poisson law on a fixed grid.

use serde::{Deserialize, Serialize};

use crate::distributions::{ContBinomial, ContPoisson, ContinuousLaw};
use crate::error::{Error, Result};

/// How `p` is tied to `N` along the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PRule {
    /// `p = λ / N`
    #[default]
    Ratio,
    /// `p = λ / N + N^-2`, which still has `N p -> λ`.
    RatioPlusInverseSquare,
}

impl PRule {
    pub fn p(&self, lambda: f64, n: f64) -> f64 {
        match self {
            PRule::Ratio => lambda / n,
            PRule::RatioPlusInverseSquare => lambda / n + 1.0 / (n * n),
        }
    }
}

pub const DEFAULT_SCHEDULE: [f64; 5] = [16.0, 64.0, 256.0, 1024.0, 4096.0];
const UNIFORM_GRID_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceExperiment {
    pub lambda: f64,
    pub n_schedule: Vec<f64>,
    pub grid: Vec<f64>,
    pub p_rule: PRule,
}

impl ConvergenceExperiment {
    /// Experiment on [`default_grid`], validated.
    pub fn new(lambda: f64, n_schedule: Vec<f64>, p_rule: PRule) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::domain(format!("lambda must be finite and positive, got {lambda}")));
        }
        let min_n = n_schedule.iter().copied().fold(f64::INFINITY, f64::min);
        let grid = default_grid(lambda, min_n + 1.0);
        let exp = ConvergenceExperiment {
            lambda,
            n_schedule,
            grid,
            p_rule,
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::domain(format!("lambda must be finite and positive, got {}", self.lambda)));
        }
        if self.n_schedule.is_empty() {
            return Err(Error::domain("N schedule is empty"));
        }
        for w in self.n_schedule.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain(format!("N schedule must be increasing, got {} then {}", w[0], w[1])));
            }
        }
        for &n in &self.n_schedule {
            let p = self.p_rule.p(self.lambda, n);
            if !(n > 0.0) || !n.is_finite() || !(p > 0.0 && p < 1.0) {
                return Err(Error::domain(format!("N = {n} gives p = {p}, outside (0, 1)")));
            }
        }
        if self.grid.is_empty() {
            return Err(Error::domain("evaluation grid is empty"));
        }
        let hull = self.n_schedule[0] + 1.0;
        for w in self.grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain("evaluation grid must be strictly increasing"));
            }
        }
        if !(self.grid[0] >= 0.0) || !(self.grid[self.grid.len() - 1] <= hull) {
            return Err(Error::domain(format!("grid must lie in [0, min N + 1] = [0, {hull}]")));
        }
        Ok(())
    }
}

/// 200 equispaced points on `[0, λ + 6√λ + 4]` merged with the half-integers
/// in that range, all clipped to `[0, upper]`.
pub fn default_grid(lambda: f64, upper: f64) -> Vec<f64> {
    let end = lambda + 6.0 * lambda.sqrt() + 4.0;
    let step = end / (UNIFORM_GRID_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..UNIFORM_GRID_POINTS).map(|i| i as f64 * step).collect();
    let mut half = 0.5;
    while half <= end {
        grid.push(half);
        half += 0.5;
    }
    grid.retain(|&x| x <= upper);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// One row of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n: f64,
    pub p: f64,
    pub sup_cdf_distance: f64,
    pub sup_interval_distance: f64,
    /// `|F_{N,p}(x) - F_λ(x)|` per grid point.
    pub cdf_distances: Vec<f64>,
    /// Mass difference on `[x, x+1)` per grid point; `None` where `x > N`.
    pub interval_distances: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub lambda: f64,
    pub p_rule: PRule,
    pub grid: Vec<f64>,
    pub records: Vec<ConvergenceRecord>,
    /// `sup_cdf_distance` strictly decreasing along the schedule.
    pub cdf_monotone: bool,
    /// `sup_interval_distance` strictly decreasing along the schedule.
    pub interval_monotone: bool,
    /// At every grid point the interval distance at the largest `N` is below
    /// the one at the smallest `N`.
    pub interval_pointwise_decrease: bool,
    /// Stronger: strictly decreasing along the whole schedule at every grid
    /// point. Can fail near an `x` where the signed difference changes sign.
    pub interval_pointwise_strict: bool,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,p,sup_cdf_distance,sup_interval_distance\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{},{}\n", r.n, r.p, r.sup_cdf_distance, r.sup_interval_distance));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn strictly_decreasing(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn run_convergence(exp: &ConvergenceExperiment) -> Result<ConvergenceReport> {
    exp.validate()?;
    let limit = ContPoisson::new(exp.lambda)?;
    let limit_cdf = exp
        .grid
        .iter()
        .map(|&x| limit.cdf(x).map_err(|e| e.annotate(&format!("Poisson limit at x = {x}"))))
        .collect::<Result<Vec<_>>>()?;
    let limit_mass = exp
        .grid
        .iter()
        .map(|&x| limit.interval_mass(x).map_err(|e| e.annotate(&format!("Poisson limit at x = {x}"))))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(exp.n_schedule.len());
    for &n in &exp.n_schedule {
        let p = exp.p_rule.p(exp.lambda, n);
        let law = ContBinomial::new(n, p)?;
        let mut cdf_distances = Vec::with_capacity(exp.grid.len());
        let mut interval_distances = Vec::with_capacity(exp.grid.len());
        for (i, &x) in exp.grid.iter().enumerate() {
            let at = |e: Error| e.annotate(&format!("N = {n}, x = {x}"));
            cdf_distances.push((law.cdf(x).map_err(at)? - limit_cdf[i]).abs());
            interval_distances.push(if x <= n {
                Some((law.interval_mass(x).map_err(at)? - limit_mass[i]).abs())
            } else {
                None
            });
        }
        let sup_cdf_distance = cdf_distances.iter().copied().fold(0.0, f64::max);
        let sup_interval_distance = interval_distances.iter().flatten().copied().fold(0.0, f64::max);
        records.push(ConvergenceRecord {
            n,
            p,
            sup_cdf_distance,
            sup_interval_distance,
            cdf_distances,
            interval_distances,
        });
    }

    let cdf_monotone = strictly_decreasing(records.iter().map(|r| r.sup_cdf_distance));
    let interval_monotone = strictly_decreasing(records.iter().map(|r| r.sup_interval_distance));
    let per_point = |i: usize| -> Vec<f64> { records.iter().filter_map(|r| r.interval_distances[i]).collect() };
    let interval_pointwise_decrease = (0..exp.grid.len()).all(|i| {
        let d = per_point(i);
        d.len() < 2 || d[d.len() - 1] < d[0]
    });
    let interval_pointwise_strict = (0..exp.grid.len()).all(|i| strictly_decreasing(per_point(i).into_iter()));
    Ok(ConvergenceReport {
        lambda: exp.lambda,
        p_rule: exp.p_rule,
        grid: exp.grid.clone(),
        records,
        cdf_monotone,
        interval_monotone,
        interval_pointwise_decrease,
        interval_pointwise_strict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalMassComparison {
    pub binomial_mass: f64,
    pub poisson_mass: f64,
    pub abs_diff: f64,
}

/// Masses of `[x, x+1)` under the continuous binomial law with `p = λ/n`
/// and under the continuous Poisson law with intensity `λ`.
pub fn interval_mass_limit_check(lambda: f64, n: f64, x: f64) -> Result<IntervalMassComparison> {
    if !(lambda > 0.0) || !(n > 0.0) || !(lambda / n < 1.0) {
        return Err(Error::domain(format!("need lambda > 0 and lambda / n < 1, got lambda = {lambda}, n = {n}")));
    }
    let binomial_mass = ContBinomial::new(n, lambda / n)?.interval_mass(x)?;
    let poisson_mass = ContPoisson::new(lambda)?.interval_mass(x)?;
    Ok(IntervalMassComparison {
        binomial_mass,
        poisson_mass,
        abs_diff: (binomial_mass - poisson_mass).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = default_grid(2.0, 100.0);
        let end = 2.0 + 6.0 * 2f64.sqrt() + 4.0;
        assert_eq!(g[0], 0.0);
        assert!((g[g.len() - 1] - end).abs() < 1e-12);
        assert!(g.contains(&0.5) && g.contains(&14.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let clipped = default_grid(2.0, 5.0);
        assert!(clipped.iter().all(|&x| x <= 5.0));
    }

    #[test]
    fn validation() {
        assert!(ConvergenceExperiment::new(2.0, vec![16.0, 64.0], PRule::Ratio).is_ok());
        assert!(ConvergenceExperiment::new(2.0, vec![64.0, 16.0], PRule::Ratio).is_err());
        assert!(ConvergenceExperiment::new(2.0, vec![1.5, 16.0], PRule::Ratio).is_err());
        assert!(ConvergenceExperiment::new(2.0, vec![], PRule::Ratio).is_err());
        assert!(ConvergenceExperiment::new(0.0, vec![16.0], PRule::Ratio).is_err());
        let mut exp = ConvergenceExperiment::new(2.0, vec![16.0], PRule::Ratio).unwrap();
        exp.grid = vec![0.0, 20.0];
        assert!(exp.validate().is_err());
    }

    #[test]
    fn mass_at_zero_matches_elementary_limit() {
        let c = interval_mass_limit_check(2.0, 1024.0, 0.0).unwrap();
        assert!((c.binomial_mass - (1.0 - 2.0 / 1024.0f64).powi(1024)).abs() < 1e-14);
        assert!((c.poisson_mass - (-2.0f64).exp()).abs() < 1e-16);
        // e^-2 λ²/(2N) to leading order
        assert!((c.abs_diff - 2.64e-4).abs() < 5e-6, "{}", c.abs_diff);
    }

    #[test]
    fn csv_layout() {
        let exp = ConvergenceExperiment::new(2.0, vec![16.0], PRule::Ratio).unwrap();
        let csv = run_convergence(&exp).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,p,sup_cdf_distance,sup_interval_distance");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("16,0.125,"));
    }
}
