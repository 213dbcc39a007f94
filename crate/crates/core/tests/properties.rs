use contpois::distributions::classical::{classical_binomial_cdf, classical_poisson_cdf};
use contpois::gamma_process::{ks_compare, GammaProcessParams, HitTimeExperiment, HitTimes};
use contpois::moments::{battery_quadrature, moment, MomentRequest, MomentRoute};
use contpois::special::{integrate, reg_gamma_upper, volterra_nu, QuadratureConfig};
use contpois::{ContBinomial, ContPoisson, ContinuousLaw, DensityRoute, RandomStream};
use proptest::prelude::*;

fn poisson(lambda: f64) -> ContPoisson {
    ContPoisson::new(lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn poisson_cdf_is_a_monotone_probability(lambda in 0.05f64..40.0, a in 0.0f64..80.0, b in 0.0f64..80.0) {
        let law = poisson(lambda);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (fl, fh) = (law.cdf(lo).unwrap(), law.cdf(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
        prop_assert!(fl <= fh);
    }

    #[test]
    fn binomial_cdf_is_a_monotone_probability(n in 0.5f64..40.0, p in 0.01f64..0.99, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let law = ContBinomial::new(n, p).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (xl, xh) = (lo * (n + 1.0), hi * (n + 1.0));
        let (fl, fh) = (law.cdf(xl).unwrap(), law.cdf(xh).unwrap());
        prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
        prop_assert!(fl <= fh);
    }

    #[test]
    fn cdf_pair_is_complementary(lambda in 0.05f64..40.0, x in 0.0f64..80.0) {
        let (low, high) = poisson(lambda).cdf_pair(x).unwrap();
        prop_assert!((low + high - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn quantile_inverts_cdf(lambda in 0.2f64..30.0, u in 0.0f64..1.0) {
        let law = poisson(lambda);
        let x = 0.1 + u * (lambda + 4.0 * lambda.sqrt() + 2.0);
        let q = law.cdf(x).unwrap();
        let back = law.quantile(q).unwrap();
        // a CDF error of one ulp moves x by about eps / density
        let slack = 8.0 * f64::EPSILON / law.pdf(x, DensityRoute::Derivative).unwrap();
        prop_assert!((back - x).abs() <= 1e-8 * x.max(1.0) + slack, "x = {x}, back = {back}");
    }

    #[test]
    fn interval_mass_is_a_cdf_difference(lambda in 0.05f64..30.0, x in 0.0f64..60.0) {
        let law = poisson(lambda);
        let direct = law.cdf(x + 1.0).unwrap() - law.cdf(x).unwrap();
        prop_assert!((law.interval_mass(x).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn integer_points_match_classical_laws(lambda in 0.05f64..30.0, k in 1u32..40, n in 1u64..30, p in 0.01f64..0.99) {
        let x = k as f64;
        let c = classical_poisson_cdf(lambda, x).unwrap();
        prop_assert!((poisson(lambda).cdf(x).unwrap() - c).abs() < 1e-12);
        let kb = x.min(n as f64);
        let cb = classical_binomial_cdf(n, p, kb).unwrap();
        let law = ContBinomial::new(n as f64, p).unwrap();
        prop_assert!((law.cdf(kb).unwrap() - cb).abs() < 1e-12);
    }

    #[test]
    fn samples_stay_in_support_and_repeat(n in 0.5f64..20.0, p in 0.05f64..0.95, seed in any::<u64>()) {
        let law = ContBinomial::new(n, p).unwrap();
        let stream = RandomStream::new(seed, 3);
        let a = law.sample(&stream, 16).unwrap();
        prop_assert!(a.iter().all(|&v| (0.0..=n + 1.0).contains(&v)));
        prop_assert_eq!(a, law.sample(&stream, 16).unwrap());
    }

    #[test]
    fn coarsening_never_moves_a_hit_earlier(steps in prop::collection::vec(1u64..10_000, 1..50), factor in 1u64..9) {
        let times = HitTimes {
            alpha: 1.0,
            dt: 1e-3,
            steps: steps.iter().map(|&s| Some(s)).collect(),
            censored: 0,
            method: String::new(),
        };
        let fine = times.scaled_times();
        let coarse = times.coarsen(factor).unwrap().scaled_times();
        for (f, c) in fine.iter().zip(&coarse) {
            prop_assert!(*c >= *f - 1e-12);
            prop_assert!(*c - *f < factor as f64 * 1e-3 + 1e-12);
        }
    }
}

#[test]
fn upper_gamma_is_monotone_on_a_grid() {
    let xs: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let lambdas: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    for &x in &xs {
        let col: Vec<f64> = lambdas.iter().map(|&l| reg_gamma_upper(x, l).unwrap()).collect();
        assert!(col.windows(2).all(|w| w[1] <= w[0]), "not decreasing in lambda at x = {x}");
    }
    for &l in &lambdas {
        let row: Vec<f64> = xs.iter().map(|&x| reg_gamma_upper(x, l).unwrap()).collect();
        assert!(row.windows(2).all(|w| w[1] >= w[0]), "not increasing in x at lambda = {l}");
    }
}

#[test]
fn nu_increases_beyond_one() {
    let cfg = QuadratureConfig::default();
    let vals: Vec<f64> = (0..30).map(|i| volterra_nu(1.0 + 0.5 * i as f64, &cfg).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn quadrature_textbook_integrals() {
    use std::f64::consts::{E, PI};
    let cfg = QuadratureConfig::with_tolerances(1e-13, 1e-12);
    type Case = (&'static str, Box<dyn Fn(f64) -> f64>, f64, f64, f64);
    let cases: [Case; 10] = [
        ("x^2", Box::new(|x| x * x), 0.0, 1.0, 1.0 / 3.0),
        ("sin", Box::new(f64::sin), 0.0, PI, 2.0),
        ("exp", Box::new(f64::exp), 0.0, 1.0, E - 1.0),
        ("1/(1+x^2)", Box::new(|x| 1.0 / (1.0 + x * x)), 0.0, 1.0, PI / 4.0),
        ("ln", Box::new(f64::ln), 0.0, 1.0, -1.0),
        ("1/sqrt", Box::new(|x| 1.0 / x.sqrt()), 0.0, 1.0, 2.0),
        ("cos^2", Box::new(|x| x.cos().powi(2)), 0.0, 2.0 * PI, PI),
        ("1/x", Box::new(|x| 1.0 / x), 1.0, E, 1.0),
        ("exp(-x)", Box::new(|x| (-x).exp()), 0.0, f64::INFINITY, 1.0),
        ("gauss", Box::new(|x| (-x * x).exp()), 0.0, f64::INFINITY, PI.sqrt() / 2.0),
    ];
    for (name, f, a, b, exact) in cases {
        let est = integrate(f, a, b, &cfg).unwrap();
        assert!((est.value - exact).abs() < 1e-10, "{name}: {} vs {exact}", est.value);
    }
}

#[test]
fn moments_grow_with_lambda() {
    let cfg = battery_quadrature();
    for k in 1..=3 {
        let m: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|&l| moment(&MomentRequest::new(l, k, MomentRoute::TailIntegral).unwrap(), &cfg).unwrap())
            .collect();
        assert!(m.windows(2).all(|w| w[1] > w[0]), "k = {k}: {m:?}");
    }
}

#[test]
fn exact_inverse_cdf_samples_pass_ks() {
    let law = poisson(5.0);
    let samples = law.sample(&RandomStream::new(7, 0), 20_000).unwrap();
    let report = ks_compare(&samples, &law, "exact").unwrap();
    assert!(report.below_critical, "{report:?}");
}

#[test]
fn horizon_covers_the_limit_law() {
    let exp = HitTimeExperiment::new(GammaProcessParams::new(2.0, 1.0).unwrap(), 3.0, 1e-2, 10, RandomStream::new(1, 0))
        .unwrap();
    let tail = exp.limit_law().unwrap().cdf_pair(exp.process.alpha * exp.t_max).unwrap().1;
    assert!(tail <= 1e-6);
}
