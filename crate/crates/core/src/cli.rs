//! Command-line front end: `simulate`, `estimate`, `bench` and `hill`.
//!
//! A JSON run configuration describes the model, marks, estimator tuning,
//! seed and output location; command-line flags override it. Exit codes are
//! 0 on success, 1 on I/O or resource errors and failed audits, 2 on
//! configuration or input errors, and 3 on numerical failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench::{self, McReport};
use crate::error::{Error, Result};
use crate::estimator::{
    self, CutoffRule, EstimatorConfig, KappaExponent, ThresholdConstant, ThresholdRule, XGrid,
};
use crate::model::{self, MarkDistribution, ModelParams, SmoothnessConfig};
use crate::simulator::{self, SampleSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    F64le,
}

/// Physical rates and the sampling interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda: f64,
    pub alpha: f64,
    #[serde(default = "one")]
    pub delta: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AdaptiveWord {
    Adaptive,
}

/// Threshold constant: a number or the string `"adaptive"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ConstantSetting {
    Fixed(f64),
    Named(AdaptiveWord),
}

impl From<ConstantSetting> for ThresholdConstant {
    fn from(c: ConstantSetting) -> Self {
        match c {
            ConstantSetting::Fixed(v) => ThresholdConstant::Fixed(v),
            ConstantSetting::Named(AdaptiveWord::Adaptive) => ThresholdConstant::Adaptive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    /// Defaults to the model's `lambda / alpha`.
    #[serde(default)]
    pub ratio: Option<f64>,
    /// Fixed integration limit; takes precedence over the theorem rule.
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default = "yes")]
    pub use_theorem_bandwidth: bool,
    /// Multiplier applied to the theorem cutoff.
    #[serde(default = "one")]
    pub cutoff_scale: f64,
    #[serde(rename = "C", default = "adaptive")]
    c: ConstantSetting,
    /// Fixed threshold; takes precedence over `C`.
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default = "double")]
    pub kappa_exponent: KappaExponent,
    #[serde(default)]
    pub bin_width: Option<f64>,
    #[serde(default = "default_u_points")]
    pub u_points: usize,
    #[serde(default)]
    pub x_grid: Option<XGrid>,
    #[serde(default)]
    pub renormalize: bool,
}

fn yes() -> bool {
    true
}
fn adaptive() -> ConstantSetting {
    ConstantSetting::Named(AdaptiveWord::Adaptive)
}
fn double() -> KappaExponent {
    KappaExponent::Double
}
fn default_u_points() -> usize {
    estimator::DEFAULT_U_POINTS
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            ratio: None,
            cutoff: None,
            s: 1.0,
            use_theorem_bandwidth: true,
            cutoff_scale: 1.0,
            c: adaptive(),
            kappa: None,
            kappa_exponent: KappaExponent::Double,
            bin_width: None,
            u_points: estimator::DEFAULT_U_POINTS,
            x_grid: None,
            renormalize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "current_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn current_dir() -> PathBuf {
    PathBuf::from(".")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: current_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub horizon: f64,
    pub grid_step: f64,
}

impl Default for TraceSection {
    fn default() -> Self {
        TraceSection {
            horizon: 200.0,
            grid_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default = "one")]
    pub m: f64,
    /// Class constants; computed from the marks when absent.
    #[serde(rename = "K", default)]
    pub k: Option<f64>,
    #[serde(rename = "L", default)]
    pub l: Option<f64>,
    #[serde(default = "default_audit_u_max")]
    pub u_max: f64,
    #[serde(default = "default_audit_points")]
    pub points: usize,
}

fn default_audit_u_max() -> f64 {
    8.0
}
fn default_audit_points() -> usize {
    1601
}

impl Default for AuditSection {
    fn default() -> Self {
        AuditSection {
            s: 1.0,
            m: 1.0,
            k: None,
            l: None,
            u_max: default_audit_u_max(),
            points: default_audit_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub audit: AuditSection,
}

fn default_n_list() -> Vec<usize> {
    vec![10_000, 100_000, 1_000_000]
}
fn default_runs() -> usize {
    100
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            n_list: default_n_list(),
            runs: default_runs(),
            audit: AuditSection::default(),
        }
    }
}

/// Run configuration file. Unknown keys are rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub marks: MarkDistribution,
    #[serde(default)]
    pub estimator: EstimatorSection,
    #[serde(default)]
    pub seed: u64,
    /// Sample size for `simulate`, and for `estimate`/`hill` without input.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub bench: BenchSection,
}

fn default_n() -> usize {
    100_000
}

impl RunConfig {
    /// Reference detector experiment with its benchmark tuning.
    pub fn reference() -> Self {
        let spec = model::ModelSpec::reference();
        RunConfig {
            model: ModelSection {
                lambda: spec.lambda,
                alpha: spec.alpha,
                delta: spec.delta,
            },
            marks: spec.marks,
            estimator: EstimatorSection {
                cutoff_scale: 0.1,
                x_grid: bench::reference_estimator_config().x_grid,
                ..EstimatorSection::default()
            },
            seed: 0,
            n: default_n(),
            output: OutputSection::default(),
            trace: TraceSection::default(),
            bench: BenchSection::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::input(format!("config: {e}")))?;
        cfg.params()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> Result<ModelParams> {
        model::normalize(self.model.lambda, self.model.alpha, self.model.delta)
    }

    pub fn estimator_config(&self) -> Result<EstimatorConfig> {
        let e = &self.estimator;
        let ratio = match e.ratio {
            Some(r) => r,
            None => self.params()?.ratio,
        };
        let cutoff = match (e.cutoff, e.use_theorem_bandwidth) {
            (Some(c), _) => CutoffRule::Fixed(c),
            (None, true) => CutoffRule::Theorem {
                s: e.s,
                scale: e.cutoff_scale,
            },
            (None, false) => {
                return Err(Error::param(
                    "estimator needs a cutoff or use_theorem_bandwidth = true",
                ))
            }
        };
        let threshold = match e.kappa {
            Some(k) => ThresholdRule::Fixed(k),
            None => ThresholdRule::Theorem {
                constant: e.c.into(),
                exponent: e.kappa_exponent,
            },
        };
        let config = EstimatorConfig {
            ratio,
            cutoff,
            threshold,
            bin_width: e.bin_width,
            u_points: e.u_points,
            x_grid: e.x_grid,
            renormalize: e.renormalize,
        };
        config.validate()?;
        Ok(config)
    }

    fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "shotnoise",
    version,
    about = "Shot-noise simulation and mark density estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a sampled series (and optionally a continuous trace).
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write an event-level trace.
        #[arg(long)]
        trace: bool,
    },
    /// Estimate the mark density from a series file or a fresh simulation.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Series file (CSV, or raw f64le when the extension is .f64le).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Monte-Carlo benchmark, rate check or lower-bound audit.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        tuning: TuningArgs,
        #[command(flatten)]
        mode: BenchMode,
        /// Worker threads; defaults to the number of logical cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// For --rate: fit a previously written `n,runs,mean_sup_error,variance` CSV.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Estimate lambda/alpha from the lower tail of a series.
    Hill {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of order statistics; defaults to floor(n^0.6).
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
}

#[derive(Debug, Args)]
pub struct TuningArgs {
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Threshold constant: a number or `adaptive`.
    #[arg(long = "C", value_parser = parse_constant)]
    pub c: Option<ThresholdConstant>,
    #[arg(long)]
    pub bin_width: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct BenchMode {
    #[arg(long)]
    pub table1: bool,
    #[arg(long)]
    pub rate: bool,
    #[arg(long)]
    pub audit: bool,
}

fn parse_constant(s: &str) -> std::result::Result<ThresholdConstant, String> {
    if s.eq_ignore_ascii_case("adaptive") {
        return Ok(ThresholdConstant::Adaptive);
    }
    s.parse::<f64>()
        .map(ThresholdConstant::Fixed)
        .map_err(|_| format!("expected a number or 'adaptive', got '{s}'"))
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::InvalidInput(_) | Error::Json(_) => 2,
        Error::NumericalFailure { .. } => 3,
        Error::Io(_) | Error::Resource(_) | Error::AuditFailure(_) => 1,
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::reference(),
    };
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    if !common.format.is_empty() {
        cfg.output.formats = common.format.clone();
    }
    prepare_output_dir(&cfg.output.dir)?;
    Ok(cfg)
}

fn apply_tuning(cfg: &mut RunConfig, t: &TuningArgs) {
    if let Some(c) = t.cutoff {
        cfg.estimator.cutoff = Some(c);
    }
    if let Some(k) = t.kappa {
        cfg.estimator.kappa = Some(k);
    }
    if let Some(c) = t.c {
        cfg.estimator.c = match c {
            ThresholdConstant::Fixed(v) => ConstantSetting::Fixed(v),
            ThresholdConstant::Adaptive => adaptive(),
        };
        // An explicit constant means the theorem threshold.
        if t.kappa.is_none() {
            cfg.estimator.kappa = None;
        }
    }
    if let Some(bw) = t.bin_width {
        cfg.estimator.bin_width = Some(bw);
    }
}

fn prepare_output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let probe = dir.join(".shotnoise-write-check");
    File::create(&probe)?;
    std::fs::remove_file(&probe)?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Finite numbers as JSON numbers, infinities and NaN as strings.
fn json_f64(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(crate::fmt_f64(v))
    }
}

fn load_or_simulate(cfg: &RunConfig, input: Option<&Path>) -> Result<SampleSeries> {
    let params = cfg.params()?;
    match input {
        Some(path) => {
            let values = if path.extension().is_some_and(|e| e == "f64le") {
                simulator::read_values_f64le(path)
            } else {
                simulator::read_values_csv(path)
            }
            .map_err(|e| match e {
                Error::Io(io) => Error::input(format!("{}: {io}", path.display())),
                other => other,
            })?;
            SampleSeries::from_observations(values, params, cfg.marks.clone())
        }
        None => simulator::simulate_series(
            &params,
            &cfg.marks,
            cfg.n,
            params.default_burn_in(),
            cfg.seed,
        ),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { common, trace } => cmd_simulate(&resolve_config(&common)?, trace),
        Command::Estimate {
            common,
            tuning,
            input,
        } => {
            let mut cfg = resolve_config(&common)?;
            apply_tuning(&mut cfg, &tuning);
            cmd_estimate(&cfg, input.as_deref())
        }
        Command::Bench {
            common,
            tuning,
            mode,
            jobs,
            input,
        } => {
            let mut cfg = resolve_config(&common)?;
            apply_tuning(&mut cfg, &tuning);
            if let Some(n) = common.n {
                cfg.bench.n_list = vec![n];
            }
            if mode.table1 {
                cmd_bench_table1(&cfg, jobs)
            } else if mode.rate {
                cmd_bench_rate(&cfg, jobs, input.as_deref())
            } else {
                cmd_bench_audit(&cfg, common.n)
            }
        }
        Command::Hill { common, input, k } => {
            cmd_hill(&resolve_config(&common)?, input.as_deref(), k)
        }
    }
}

/// Writes `series.{csv,json,f64le}` per the selected formats plus
/// `series.meta.json`; with `trace`, also `trace_path.csv` and
/// `trace_events.csv`.
pub fn cmd_simulate(cfg: &RunConfig, trace: bool) -> Result<()> {
    let params = cfg.params()?;
    let dir = &cfg.output.dir;
    let series = simulator::simulate_series(
        &params,
        &cfg.marks,
        cfg.n,
        params.default_burn_in(),
        cfg.seed,
    )?;
    if cfg.wants(Format::Csv) {
        let mut w = create(dir, "series.csv")?;
        series.write_csv(&mut w)?;
        w.flush()?;
    }
    if cfg.wants(Format::F64le) {
        let mut w = create(dir, "series.f64le")?;
        series.write_f64le(&mut w)?;
        w.flush()?;
    }
    if cfg.wants(Format::Json) {
        let mut w = create(dir, "series.json")?;
        serde_json::to_writer(&mut w, &series)?;
        w.flush()?;
    }
    let mut meta = series.metadata_json();
    meta["config"] = serde_json::to_value(cfg)?;
    write_json(dir, "series.meta.json", &meta)?;
    if trace {
        let t = simulator::simulate_trace(
            &params,
            &cfg.marks,
            cfg.trace.horizon,
            cfg.trace.grid_step,
            cfg.seed,
        )?;
        let mut w = create(dir, "trace_path.csv")?;
        t.write_path_csv(&mut w)?;
        w.flush()?;
        let mut w = create(dir, "trace_events.csv")?;
        t.write_events_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Writes `density.csv` (and `density.json` when requested) plus
/// `diagnostics.json`.
pub fn cmd_estimate(cfg: &RunConfig, input: Option<&Path>) -> Result<()> {
    let config = cfg.estimator_config()?;
    let sample = load_or_simulate(cfg, input)?;
    let est = estimator::estimate_density(&sample, &config)?;
    let dir = &cfg.output.dir;
    if cfg.wants(Format::Csv) || !cfg.wants(Format::Json) {
        let mut w = create(dir, "density.csv")?;
        est.write_csv(&mut w)?;
        w.flush()?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            dir,
            "density.json",
            &serde_json::json!({"x": est.x, "theta_hat": est.theta_hat}),
        )?;
    }
    write_json(dir, "diagnostics.json", &est.diagnostics_json())?;
    if let Some(w) = &est.diagnostics.warning {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn bench_estimator(cfg: &RunConfig) -> Result<EstimatorConfig> {
    let mut config = cfg.estimator_config()?;
    if config.x_grid.is_none() {
        config.x_grid = Some(bench::default_error_grid(&cfg.marks)?);
    }
    Ok(config)
}

fn write_reports(dir: &Path, stem: &str, reports: &[McReport], json: bool) -> Result<()> {
    let mut w = create(dir, &format!("{stem}.csv"))?;
    bench::write_reports_csv(reports, &mut w)?;
    w.flush()?;
    let mut w = create(dir, &format!("{stem}_runs.csv"))?;
    bench::write_per_run_csv(reports, &mut w)?;
    w.flush()?;
    if json {
        let mut w = create(dir, &format!("{stem}.json"))?;
        bench::write_reports_json(reports, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Writes `table1.csv`, `table1_runs.csv` and, with json, `table1.json`.
pub fn cmd_bench_table1(cfg: &RunConfig, jobs: Option<usize>) -> Result<()> {
    let params = cfg.params()?;
    let config = bench_estimator(cfg)?;
    let pool = bench::worker_pool(jobs)?;
    let reports = bench::run_table1(
        &params,
        &cfg.marks,
        &config,
        &cfg.bench.n_list,
        cfg.bench.runs,
        cfg.seed,
        &pool,
    )?;
    write_reports(&cfg.output.dir, "table1", &reports, cfg.wants(Format::Json))?;
    for r in &reports {
        println!(
            "n={} runs={} mean_sup_error={} variance={}",
            r.n,
            r.runs,
            crate::fmt_f64(r.mean_sup_error),
            crate::fmt_f64(r.variance_sup_error)
        );
    }
    Ok(())
}

/// Reads `n` and `mean_sup_error` columns from a report CSV.
pub fn read_report_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .unwrap_or("")
        .split(',')
        .map(str::trim)
        .collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| Error::input(format!("{}: missing column '{name}'", path.display())))
    };
    let (ni, ei) = (col("n")?, col("mean_sup_error")?);
    let mut ns = Vec::new();
    let mut es = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |j: usize| -> Result<f64> {
            fields
                .get(j)
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Error::input(format!("{}:{}: malformed row", path.display(), i + 2)))
        };
        ns.push(get(ni)?);
        es.push(get(ei)?);
    }
    Ok((ns, es))
}

/// Writes `rate.json`; when simulating, also `rate.csv` and `rate_runs.csv`.
pub fn cmd_bench_rate(cfg: &RunConfig, jobs: Option<usize>, input: Option<&Path>) -> Result<()> {
    let dir = &cfg.output.dir;
    let (fit, n_list) = match input {
        Some(path) => {
            let (ns, es) = read_report_csv(path)?;
            (bench::fit_log_slope(&ns, &es)?, ns)
        }
        None => {
            let params = cfg.params()?;
            let config = bench_estimator(cfg)?;
            let pool = bench::worker_pool(jobs)?;
            let rate = bench::run_rate_check(
                &params,
                &cfg.marks,
                &config,
                &cfg.bench.n_list,
                cfg.bench.runs,
                cfg.seed,
                &pool,
            )?;
            write_reports(dir, "rate", &rate.reports, false)?;
            (rate.fit, rate.reports.iter().map(|r| r.n as f64).collect())
        }
    };
    write_json(
        dir,
        "rate.json",
        &serde_json::json!({
            "n": n_list,
            "slope": json_f64(fit.slope),
            "intercept": json_f64(fit.intercept),
            "half_width": json_f64(fit.half_width),
        }),
    )?;
    println!(
        "slope={} half_width={}",
        crate::fmt_f64(fit.slope),
        crate::fmt_f64(fit.half_width)
    );
    Ok(())
}

/// Writes `audit.json`; a violated bound is reported and turned into an
/// audit failure.
pub fn cmd_bench_audit(cfg: &RunConfig, n: Option<usize>) -> Result<()> {
    let params = cfg.params()?;
    let a = &cfg.bench.audit;
    let brute = bench::brute_force_smoothness(&cfg.marks, a.s, a.m)?;
    let smooth = SmoothnessConfig::new(a.s, a.k.unwrap_or(brute.k), a.l.unwrap_or(brute.l), a.m)?;
    let config = cfg.estimator_config()?;
    let report = bench::run_lower_bound_audit(
        &params,
        &cfg.marks,
        &smooth,
        &config,
        n.unwrap_or(cfg.n),
        cfg.seed,
        a.u_max,
        a.points,
    )?;
    let mut value = serde_json::to_value(&report)?;
    value["ecf_first_crossing"] = report
        .ecf_first_crossing
        .map_or(serde_json::Value::Null, json_f64);
    write_json(&cfg.output.dir, "audit.json", &value)?;
    println!(
        "{} min_slack={} at u={}",
        if report.passed { "pass" } else { "FAIL" },
        crate::fmt_f64(report.min_slack),
        crate::fmt_f64(report.argmin_u)
    );
    report.into_result().map(|_| ())
}

/// Prints the estimate and writes `hill.json`.
pub fn cmd_hill(cfg: &RunConfig, input: Option<&Path>, k: Option<usize>) -> Result<()> {
    let sample = load_or_simulate(cfg, input)?;
    let k = k.unwrap_or_else(|| estimator::default_hill_k(sample.len()));
    let est = estimator::hill_ratio(&sample, k)?;
    let warning = (!est.ratio.is_finite())
        .then(|| "Hill statistic is zero: the lower tail is degenerate".to_string());
    write_json(
        &cfg.output.dir,
        "hill.json",
        &serde_json::json!({
            "ratio": json_f64(est.ratio),
            "hill_statistic": json_f64(est.hill_statistic),
            "k": est.k,
            "n": sample.len(),
            "warning": warning,
        }),
    )?;
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    println!("ratio={} k={}", crate::fmt_f64(est.ratio), est.k);
    Ok(())
}
