//! Command-line front end.
//!
//! Every command writes one output file plus `<output>.manifest.json`
//! describing the run. Exit codes: 0 success, 1 I/O or internal failure,
//! 2 invalid arguments, 3 numerical non-convergence or a censored experiment.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::convergence::{run_convergence, ConvergenceExperiment, PRule, DEFAULT_SCHEDULE};
use crate::distributions::{ContBinomial, ContPoisson, ContinuousLaw, DensityRoute, Law};
use crate::error::Error;
use crate::gamma_process::{
    discretization_note, ks_compare, simulate_hit_times, GammaProcessParams, HitTimeExperiment, KsReport,
};
use crate::moments::{battery_quadrature, laplace_battery, moment, MomentRequest, MomentRoute};
use crate::rng::{RandomStream, GENERATOR_NAME};

pub const OUTPUT_DIR_ENV: &str = "CONTPOIS_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "contpois", version, about = "Continuous Poisson and binomial laws: evaluation, sampling and verification runs")]
struct Cli {
    /// Directory for outputs given without a path (default: current directory).
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a quantity on a set of points.
    Eval(EvalArgs),
    /// Draw inverse-CDF samples.
    Sample(SampleArgs),
    /// Binomial to Poisson convergence table.
    Converge(ConvergeArgs),
    /// Gamma-process hitting times compared with the continuous Poisson law.
    GammaHit(GammaHitArgs),
    /// Laplace-transform identity battery.
    LaplaceCheck(LaplaceCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Cpois,
    Cbinom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Cdf,
    Pdf,
    Quantile,
    IntervalMass,
    Moment,
}

#[derive(Debug, Clone, Args)]
struct LawArgs {
    /// Continuous Poisson intensity.
    #[arg(long)]
    lambda: Option<f64>,
    /// Continuous binomial N (need not be an integer).
    #[arg(long)]
    n: Option<f64>,
    /// Continuous binomial success parameter.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    family: Family,
    quantity: Quantity,
    #[command(flatten)]
    law: LawArgs,
    /// `x`, `x1,x2,...` or `start:stop:count` (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Density route (`derivative`, `double-integral`) or moment route
    /// (`volterra`, `tail`).
    #[arg(long)]
    route: Option<String>,
    /// Moment orders, `k` or `k1,k2,...`.
    #[arg(long)]
    k: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    family: Family,
    #[command(flatten)]
    law: LawArgs,
    #[arg(long)]
    count: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream_id: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PRuleArg {
    Ratio,
    RatioPlusInverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[arg(long)]
    lambda: f64,
    /// Comma-separated increasing N values.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long, value_enum, default_value = "ratio")]
    p_rule: PRuleArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GammaHitArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Level to be crossed.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n_paths: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the censoring horizon (default: the 1 - 1e-6 quantile of the
    /// limit law over alpha, plus 10 dt).
    #[arg(long)]
    t_max: Option<f64>,
    /// Skip the simulation and compare a single-column sample CSV with the
    /// continuous Poisson law of intensity `--lambda`.
    #[arg(long)]
    ks_only: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Also write the scaled hit times as a single-column CSV.
    #[arg(long)]
    samples_out: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LaplaceCheckArgs {
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Run description written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    /// `None` for commands that use no random numbers.
    pub seed: Option<u64>,
    pub library_version: String,
    pub generator_name: String,
    pub timestamp: String,
}

impl RunManifest {
    fn new(command: &str, parameters: BTreeMap<String, Value>, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            generator_name: GENERATOR_NAME.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// Manifest path for an output file.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) => CliError::Usage(m),
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(Error::Internal(_)) | CliError::Io(_) => EXIT_FAILURE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Numeric(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr as a single line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let dir = cli.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let outcome = match cli.command {
        Command::Eval(a) => cmd_eval(a, &dir),
        Command::Sample(a) => cmd_sample(a, &dir),
        Command::Converge(a) => cmd_converge(a, &dir),
        Command::GammaHit(a) => cmd_gamma_hit(a, &dir),
        Command::LaplaceCheck(a) => cmd_laplace_check(a, &dir),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("contpois: error: {}", e.message().replace('\n', " "));
            e.exit_code()
        }
    }
}

fn resolve_output(given: Option<PathBuf>, dir: &Path, default_name: &str) -> PathBuf {
    match given {
        Some(p) if p.is_absolute() || p.parent().is_some_and(|d| !d.as_os_str().is_empty()) => p,
        Some(p) => dir.join(p),
        None => dir.join(default_name),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_with_manifest(path: &Path, contents: &str, manifest: &RunManifest) -> CliResult<()> {
    write_file(path, contents)?;
    let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    write_file(&manifest_path(path), &text)
}

/// Shortest decimal that reads back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v}")
}

fn build_law(family: Family, law: &LawArgs, params: &mut BTreeMap<String, Value>) -> CliResult<Law> {
    match family {
        Family::Cpois => {
            let lambda = law.lambda.ok_or_else(|| usage("cpois needs --lambda"))?;
            if law.n.is_some() || law.p.is_some() {
                return Err(usage("--n and --p apply to cbinom only"));
            }
            params.insert("lambda".into(), json!(lambda));
            Ok(Law::Poisson(ContPoisson::new(lambda)?))
        }
        Family::Cbinom => {
            let n = law.n.ok_or_else(|| usage("cbinom needs --n"))?;
            let p = law.p.ok_or_else(|| usage("cbinom needs --p"))?;
            if law.lambda.is_some() {
                return Err(usage("--lambda applies to cpois only"));
            }
            params.insert("n".into(), json!(n));
            params.insert("p".into(), json!(p));
            Ok(Law::Binomial(ContBinomial::new(n, p)?))
        }
    }
}

fn family_name(family: Family) -> &'static str {
    match family {
        Family::Cpois => "cpois",
        Family::Cbinom => "cbinom",
    }
}

/// Parses `x`, `x1,x2,...` or `start:stop:count`.
pub fn parse_points(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    let parse = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("not a number: '{s}'"))?;
        if v.is_nan() {
            return Err("NaN is not a valid point".into());
        }
        Ok(v)
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:stop:count, got '{spec}'"));
        }
        let (start, stop) = (parse(parts[0])?, parse(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|_| format!("bad count '{}'", parts[2]))?;
        if count == 0 {
            return Err("range count must be positive".into());
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        return Ok((0..count)
            .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
            .collect());
    }
    if spec.is_empty() {
        return Err("empty point list".into());
    }
    spec.split(',').map(parse).collect()
}

fn parse_orders(spec: &str) -> CliResult<Vec<u32>> {
    spec.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| usage(format!("bad moment order '{s}'"))))
        .collect()
}

fn cmd_eval(a: EvalArgs, dir: &Path) -> CliResult<()> {
    let mut params = BTreeMap::new();
    params.insert("family".into(), json!(family_name(a.family)));
    let law = build_law(a.family, &a.law, &mut params)?;
    let quantity = a.quantity.to_possible_value().expect("no skipped variants").get_name().to_string();
    params.insert("quantity".into(), json!(quantity));

    let mut csv = String::new();
    if a.quantity == Quantity::Moment {
        let Law::Poisson(d) = law else {
            return Err(usage("moments are implemented for cpois only"));
        };
        if a.points.is_some() {
            return Err(usage("moment takes --k, not --points"));
        }
        let route = match a.route.as_deref() {
            None | Some("volterra") => MomentRoute::Volterra,
            Some("tail") | Some("tail-integral") => MomentRoute::TailIntegral,
            Some(other) => return Err(usage(format!("unknown moment route '{other}' (volterra | tail)"))),
        };
        let orders = parse_orders(a.k.as_deref().ok_or_else(|| usage("moment needs --k"))?)?;
        params.insert("route".into(), json!(route));
        params.insert("k".into(), json!(orders));
        let cfg = battery_quadrature();
        csv.push_str("k,value\n");
        for k in orders {
            let req = MomentRequest::new(d.lambda(), k, route)?;
            let v = moment(&req, &cfg).map_err(|e| e.annotate(&format!("k = {k}")))?;
            csv.push_str(&format!("{k},{}\n", num(v)));
        }
    } else {
        if a.k.is_some() {
            return Err(usage("--k applies to moment only"));
        }
        let spec = a.points.as_deref().ok_or_else(|| usage("--points is required"))?;
        let points = parse_points(spec).map_err(usage)?;
        params.insert("points".into(), json!(spec));
        let route = match (a.quantity, a.route.as_deref()) {
            (Quantity::Pdf, None | Some("derivative")) => Some(DensityRoute::Derivative),
            (Quantity::Pdf, Some("double-integral") | Some("double_integral")) => Some(DensityRoute::DoubleIntegral),
            (Quantity::Pdf, Some(other)) => {
                return Err(usage(format!("unknown density route '{other}' (derivative | double-integral)")))
            }
            (_, None) => None,
            (_, Some(_)) => return Err(usage("--route applies to pdf and moment only")),
        };
        if let Some(r) = route {
            params.insert("route".into(), json!(r));
        }
        csv.push_str("x,value\n");
        for x in points {
            let v = match a.quantity {
                Quantity::Cdf => law.cdf(x),
                Quantity::Pdf => law.pdf(x, route.expect("set for pdf")),
                Quantity::Quantile => law.quantile(x),
                Quantity::IntervalMass => law.interval_mass(x),
                Quantity::Moment => unreachable!("handled above"),
            }
            .map_err(|e| e.annotate(&format!("x = {x}")))?;
            csv.push_str(&format!("{},{}\n", num(x), num(v)));
        }
    }
    let default_name = format!("eval_{}_{}.csv", family_name(a.family), quantity);
    let path = resolve_output(a.output, dir, &default_name);
    write_with_manifest(&path, &csv, &RunManifest::new("eval", params, None))
}

fn cmd_sample(a: SampleArgs, dir: &Path) -> CliResult<()> {
    let mut params = BTreeMap::new();
    params.insert("family".into(), json!(family_name(a.family)));
    let law = build_law(a.family, &a.law, &mut params)?;
    if a.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    params.insert("count".into(), json!(a.count));
    params.insert("stream_id".into(), json!(a.stream_id));
    let stream = RandomStream::new(a.seed, a.stream_id);
    let draws = law.sample(&stream, a.count as usize)?;
    let mut csv = String::from("x\n");
    for v in draws {
        csv.push_str(&num(v));
        csv.push('\n');
    }
    let path = resolve_output(a.output, dir, &format!("sample_{}.csv", family_name(a.family)));
    write_with_manifest(&path, &csv, &RunManifest::new("sample", params, Some(a.seed)))
}

fn cmd_converge(a: ConvergeArgs, dir: &Path) -> CliResult<()> {
    let schedule = match a.schedule.as_deref() {
        None => DEFAULT_SCHEDULE.to_vec(),
        Some(s) => parse_points(s).map_err(usage)?,
    };
    let p_rule = match a.p_rule {
        PRuleArg::Ratio => PRule::Ratio,
        PRuleArg::RatioPlusInverseSquare => PRule::RatioPlusInverseSquare,
    };
    let exp = ConvergenceExperiment::new(a.lambda, schedule.clone(), p_rule)?;
    let report = run_convergence(&exp)?;
    let mut params = BTreeMap::new();
    params.insert("lambda".into(), json!(a.lambda));
    params.insert("schedule".into(), json!(schedule));
    params.insert("p_rule".into(), json!(p_rule));
    let (text, ext) = match a.format {
        ReportFormat::Csv => (report.to_csv(), "csv"),
        ReportFormat::Json => (report.to_json() + "\n", "json"),
    };
    params.insert("format".into(), json!(ext));
    let path = resolve_output(a.output, dir, &format!("converge.{ext}"));
    write_with_manifest(&path, &text, &RunManifest::new("converge", params, None))
}

/// JSON written by `gamma-hit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaHitReport {
    pub experiment: Option<HitTimeExperiment>,
    pub reference_lambda: f64,
    pub gamma_method: Option<String>,
    pub censored: u64,
    pub ks: KsReport,
}

fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if !v.is_nan() => out.push(v),
            _ if i == 0 => {} // header
            _ => return Err(usage(format!("{}:{}: not a number: '{line}'", path.display(), i + 1))),
        }
    }
    Ok(out)
}

fn cmd_gamma_hit(a: GammaHitArgs, dir: &Path) -> CliResult<()> {
    let mut params = BTreeMap::new();
    let (report, samples, seed) = if let Some(file) = &a.ks_only {
        if a.alpha.is_some() || a.beta.is_some() || a.c.is_some() || a.dt.is_some() || a.n_paths.is_some() || a.t_max.is_some() {
            return Err(usage("--ks-only takes only --lambda and an output"));
        }
        let lambda = a.lambda.ok_or_else(|| usage("--ks-only needs --lambda"))?;
        let law = ContPoisson::new(lambda)?;
        let samples = read_samples(file)?;
        params.insert("ks_only".into(), json!(file.display().to_string()));
        params.insert("lambda".into(), json!(lambda));
        let ks = ks_compare(&samples, &law, "samples read from file; no discretization")?;
        let report = GammaHitReport {
            experiment: None,
            reference_lambda: lambda,
            gamma_method: None,
            censored: 0,
            ks,
        };
        (report, None, None)
    } else {
        if a.lambda.is_some() {
            return Err(usage("--lambda is only used with --ks-only; the reference is beta * c"));
        }
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("gamma-hit needs --{flag}")));
        let (alpha, beta, c, dt) = (need(a.alpha, "alpha")?, need(a.beta, "beta")?, need(a.c, "c")?, need(a.dt, "dt")?);
        let n_paths = a.n_paths.ok_or_else(|| usage("gamma-hit needs --n-paths"))?;
        let seed = a.seed.ok_or_else(|| usage("gamma-hit needs --seed"))?;
        for (k, v) in [("alpha", alpha), ("beta", beta), ("c", c), ("dt", dt)] {
            params.insert(k.into(), json!(v));
        }
        params.insert("n_paths".into(), json!(n_paths));
        let mut exp =
            HitTimeExperiment::new(GammaProcessParams::new(alpha, beta)?, c, dt, n_paths, RandomStream::new(seed, 0))?;
        if let Some(t_max) = a.t_max {
            exp.t_max = t_max;
            exp.validate()?;
            params.insert("t_max".into(), json!(t_max));
        }
        let hits = simulate_hit_times(&exp)?;
        let samples = hits.scaled_times();
        let law = exp.limit_law()?;
        let ks = ks_compare(&samples, &law, &discretization_note(&exp, dt))?;
        let report = GammaHitReport {
            experiment: Some(exp),
            reference_lambda: law.lambda(),
            gamma_method: Some(hits.method.clone()),
            censored: hits.censored,
            ks,
        };
        (report, Some(samples), Some(seed))
    };

    if let Some(dump) = &a.samples_out {
        let Some(samples) = &samples else {
            return Err(usage("--samples-out needs a simulation run"));
        };
        let mut csv = String::from("x\n");
        for v in samples {
            csv.push_str(&num(*v));
            csv.push('\n');
        }
        let path = resolve_output(Some(dump.clone()), dir, "");
        let mut dump_params = params.clone();
        dump_params.insert("role".into(), json!("scaled hit times"));
        write_with_manifest(&path, &csv, &RunManifest::new("gamma-hit", dump_params, seed))?;
    }

    let verdict = if report.ks.below_critical { "below" } else { "above" };
    eprintln!(
        "KS = {} with n = {} ({verdict} the 1% critical value {})",
        num(report.ks.ks_statistic),
        report.ks.n_samples,
        num(report.ks.critical_value_1pct)
    );
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    let path = resolve_output(a.output, dir, "gamma_hit.json");
    write_with_manifest(&path, &text, &RunManifest::new("gamma-hit", params, seed))
}

fn cmd_laplace_check(a: LaplaceCheckArgs, dir: &Path) -> CliResult<()> {
    let checks = laplace_battery(&battery_quadrature())?;
    let mut csv = String::from("identity,parameters,numeric,closed_form,rel_error,tolerance,passed\n");
    for c in &checks {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.identity,
            c.parameters,
            num(c.numeric),
            num(c.closed_form),
            num(c.rel_error),
            num(c.tolerance),
            if c.passed { "pass" } else { "fail" }
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    eprintln!("{} of {} identities within tolerance", checks.len() - failed, checks.len());
    let path = resolve_output(a.output, dir, "laplace_check.csv");
    write_with_manifest(&path, &csv, &RunManifest::new("laplace-check", BTreeMap::new(), None))
}
