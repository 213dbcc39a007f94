use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn contpois(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contpois"))
        .args(args)
        .current_dir(dir)
        .env_remove("CONTPOIS_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = contpois(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    contpois(dir, args).status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn values(csv: &str) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect()
}

#[test]
fn eval_matches_known_values() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["eval", "cpois", "cdf", "--lambda", "1", "--points", "1", "-o", "p.csv"]);
    assert_eq!(read(d, "p.csv"), "x,value\n1,0.36787944117144233\n");
    ok(d, &["eval", "cbinom", "cdf", "--n", "1", "--p", "0.3", "--points", "1", "-o", "b.csv"]);
    assert_eq!(read(d, "b.csv"), "x,value\n1,0.7\n");
    ok(d, &["eval", "cpois", "quantile", "--lambda", "2", "--points", "0:1:5"]);
    let q = values(&read(d, "eval_cpois_quantile.csv"));
    assert_eq!(q.len(), 5);
    assert_eq!(q[0], 0.0);
    assert!(q[4].is_infinite());
}

#[test]
fn moment_routes_agree() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["eval", "cpois", "moment", "--lambda", "3", "--k", "1,2,3", "--route", "volterra", "-o", "v.csv"]);
    ok(d, &["eval", "cpois", "moment", "--lambda", "3", "--k", "1,2,3", "--route", "tail", "-o", "t.csv"]);
    let (v, t) = (values(&read(d, "v.csv")), values(&read(d, "t.csv")));
    for (a, b) in v.iter().zip(&t) {
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn density_routes_agree() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let common = ["eval", "cpois", "pdf", "--lambda", "2", "--points", "0.5,1.5,3.25"];
    ok(d, &[&common[..], &["--route", "derivative", "-o", "a.csv"]].concat());
    ok(d, &[&common[..], &["--route", "double-integral", "-o", "b.csv"]].concat());
    for (a, b) in values(&read(d, "a.csv")).iter().zip(&values(&read(d, "b.csv"))) {
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn invalid_arguments_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(code(d, &["eval", "cpois", "cdf", "--lambda", "-1", "--points", "1"]), 2);
    assert_eq!(code(d, &["eval", "cbinom", "cdf", "--n", "3", "--p", "1.5", "--points", "1"]), 2);
    assert_eq!(code(d, &["eval", "cpois", "cdf", "--lambda", "1"]), 2);
    assert_eq!(code(d, &["sample", "cpois", "--lambda", "1", "--count", "0", "--seed", "1"]), 2);
    assert_eq!(code(d, &["sample", "cpois", "--lambda", "1", "--count", "5"]), 2);
    assert_eq!(code(d, &["converge", "--lambda", "20", "--schedule", "16,64"]), 2);
    assert_eq!(code(d, &["converge", "--lambda", "2", "--schedule", "64,16"]), 2);
    let gamma = ["gamma-hit", "--alpha", "1", "--beta", "1", "--c", "5", "--n-paths", "10", "--seed", "1"];
    assert_eq!(code(d, &[&gamma[..], &["--dt", "0"]].concat()), 2);
    assert_eq!(code(d, &["no-such-command"]), 2);
}

#[test]
fn sampling_is_reproducible_and_recorded() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let args = ["sample", "cbinom", "--n", "4.5", "--p", "0.3", "--count", "500", "--seed", "77"];
    ok(d, &[&args[..], &["-o", "a.csv"]].concat());
    ok(d, &[&args[..], &["-o", "b.csv"]].concat());
    ok(d, &[&args[..], &["--stream-id", "1", "-o", "c.csv"]].concat());
    let (a, b, c) = (read(d, "a.csv"), read(d, "b.csv"), read(d, "c.csv"));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("x\n"));
    assert!(a.lines().skip(1).map(|l| l.parse::<f64>().unwrap()).all(|x| (0.0..=5.5).contains(&x)));

    let manifest: Value = serde_json::from_str(&read(d, "a.csv.manifest.json")).unwrap();
    assert_eq!(manifest["command"], "sample");
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["parameters"]["count"], 500);
    assert!(manifest["generator_name"].as_str().unwrap().starts_with("ChaCha20"));
    assert!(manifest["library_version"].is_string() && manifest["timestamp"].is_string());
}

#[test]
fn converge_writes_one_row_per_n() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["converge", "--lambda", "2"]);
    let csv = read(d, "converge.csv");
    assert!(csv.starts_with("N,p,sup_cdf_distance,sup_interval_distance\n"));
    let sup: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(sup.len(), 5);
    assert!(sup.windows(2).all(|w| w[1] < w[0]));

    ok(d, &["converge", "--lambda", "2", "--schedule", "50", "-o", "one.csv"]);
    assert_eq!(read(d, "one.csv").lines().count(), 2);
    ok(d, &["converge", "--lambda", "2", "--schedule", "16,64", "--format", "json"]);
    let report: Value = serde_json::from_str(&read(d, "converge.json")).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 2);
    assert_eq!(report["cdf_monotone"], true);
}

#[test]
fn gamma_hit_runs_and_reports() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let base = ["gamma-hit", "--alpha", "1", "--beta", "1", "--c", "5", "--dt", "0.01", "--seed", "4"];
    ok(d, &[&base[..], &["--n-paths", "2000", "--samples-out", "hits.csv"]].concat());
    let report: Value = serde_json::from_str(&read(d, "gamma_hit.json")).unwrap();
    assert_eq!(report["ks"]["n_samples"], 2000);
    assert_eq!(report["ks"]["below_critical"], true);
    assert_eq!(report["reference_lambda"], 5.0);
    assert_eq!(read(d, "hits.csv").lines().count(), 2001);

    // a single path is a valid, if uninformative, experiment
    ok(d, &[&base[..], &["--n-paths", "1", "-o", "single.json"]].concat());
    let single: Value = serde_json::from_str(&read(d, "single.json")).unwrap();
    assert!(single["ks"]["ks_statistic"].as_f64().unwrap() >= 0.5);

    // a horizon far too short censors most paths
    assert_eq!(code(d, &[&base[..], &["--n-paths", "100", "--t-max", "1"]].concat()), 3);
}

#[test]
fn ks_only_accepts_exact_samples() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["sample", "cpois", "--lambda", "5", "--count", "5000", "--seed", "8", "-o", "s.csv"]);
    ok(d, &["gamma-hit", "--ks-only", "s.csv", "--lambda", "5", "-o", "ks.json"]);
    let report: Value = serde_json::from_str(&read(d, "ks.json")).unwrap();
    assert_eq!(report["ks"]["below_critical"], true);
    assert!(read(d, "ks.json.manifest.json").contains("\"seed\": null"));
}

#[test]
fn laplace_check_passes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(d, &["laplace-check"]);
    let csv = read(d, "laplace_check.csv");
    assert!(csv.starts_with("identity,parameters,numeric,closed_form,rel_error,tolerance,passed\n"));
    assert!(csv.lines().count() > 10);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",pass")), "{csv}");
}

#[test]
fn output_dir_comes_from_the_environment() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("results");
    let status = Command::new(env!("CARGO_BIN_EXE_contpois"))
        .args(["eval", "cpois", "cdf", "--lambda", "1", "--points", "2"])
        .current_dir(tmp.path())
        .env("CONTPOIS_OUTPUT_DIR", &out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("eval_cpois_cdf.csv").is_file());
    assert!(out.join("eval_cpois_cdf.csv.manifest.json").is_file());
}
