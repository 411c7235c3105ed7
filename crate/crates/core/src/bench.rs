//! Monte-Carlo harness: sup-norm risk of the density estimator across sample
//! sizes, convergence-rate slopes, and an audit of the lower bound on the
//! marginal characteristic function.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::ecf;
use crate::error::{Error, Result};
use crate::estimator::{self, CutoffRule, EstimatorConfig, XGrid};
use crate::model::{self, admissibility, MarkDistribution, ModelParams, SmoothnessConfig};
use crate::simulator;

/// The true density must stay below this outside the evaluation grid.
pub const COVERAGE_PDF_LEVEL: f64 = 1e-6;

/// Estimator tuning for the reference mixture experiment: theorem cutoff
/// with `s = 1` scaled by 0.1, adaptive threshold constant, and a
/// 2048-point grid over `[-2, 30]`.
pub fn reference_estimator_config() -> EstimatorConfig {
    EstimatorConfig::theorem(1.25, 1.0)
        .with_cutoff(CutoffRule::Theorem { s: 1.0, scale: 0.1 })
        .with_x_grid(XGrid::spanning(-2.0, 30.0, 2048).expect("static grid"))
}

/// Model and estimator settings a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub estimator: EstimatorConfig,
    pub params: ModelParams,
    pub marks: MarkDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n: usize,
    pub runs: usize,
    pub mean_sup_error: f64,
    pub variance_sup_error: f64,
    pub per_run_errors: Vec<f64>,
    pub config_snapshot: ConfigSnapshot,
    pub wall_time_seconds: f64,
}

impl McReport {
    fn from_errors(
        n: usize,
        per_run_errors: Vec<f64>,
        config_snapshot: ConfigSnapshot,
        wall_time_seconds: f64,
    ) -> Self {
        let (mean, var) = crate::mean_and_variance(&per_run_errors);
        McReport {
            n,
            runs: per_run_errors.len(),
            mean_sup_error: mean,
            variance_sup_error: var,
            per_run_errors,
            config_snapshot,
            wall_time_seconds,
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance_sup_error / self.runs as f64).sqrt()
    }
}

/// CSV `n,runs,mean_sup_error,variance`, one row per report.
pub fn write_reports_csv<W: Write>(reports: &[McReport], mut out: W) -> Result<()> {
    writeln!(out, "n,runs,mean_sup_error,variance")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{}",
            r.n,
            r.runs,
            crate::fmt_f64(r.mean_sup_error),
            crate::fmt_f64(r.variance_sup_error)
        )?;
    }
    Ok(())
}

/// CSV `n,run,sup_error` with every run of every report.
pub fn write_per_run_csv<W: Write>(reports: &[McReport], mut out: W) -> Result<()> {
    writeln!(out, "n,run,sup_error")?;
    for r in reports {
        for (i, e) in r.per_run_errors.iter().enumerate() {
            writeln!(out, "{},{},{}", r.n, i, crate::fmt_f64(*e))?;
        }
    }
    Ok(())
}

pub fn write_reports_json<W: Write>(reports: &[McReport], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, reports)?;
    Ok(())
}

/// Interval outside which the mark density is certainly below `level`.
fn density_support(marks: &MarkDistribution, level: f64) -> Result<(f64, f64)> {
    match marks {
        MarkDistribution::GaussianMixture {
            weights,
            means,
            sds,
        } => {
            // The mixture exceeds `level` only where some component exceeds
            // `level / components`.
            let per = level / weights.len() as f64;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for ((w, m), s) in weights.iter().zip(means).zip(sds) {
                let peak = w / (s * (2.0 * std::f64::consts::PI).sqrt());
                if peak > per {
                    let z = (2.0 * (peak / per).ln()).sqrt();
                    lo = lo.min(m - z * s);
                    hi = hi.max(m + z * s);
                }
            }
            Ok((lo, hi))
        }
        MarkDistribution::Exponential { rate } => Ok((0.0, (rate / level).ln().max(0.0) / rate)),
        MarkDistribution::PointMass { .. } => Err(Error::param(
            "a point mass has no density to compare against",
        )),
    }
}

/// 2048-point grid over the region where the density exceeds
/// [`COVERAGE_PDF_LEVEL`], widened by 5% on each side.
pub fn default_error_grid(marks: &MarkDistribution) -> Result<XGrid> {
    let (lo, hi) = density_support(marks, COVERAGE_PDF_LEVEL)?;
    let pad = 0.05 * (hi - lo);
    XGrid::spanning(lo - pad, hi + pad, 2048)
}

/// `max_x |theta_hat(x) - theta(x)|` over the estimate's grid, which must
/// cover the region where `theta` exceeds [`COVERAGE_PDF_LEVEL`].
pub fn sup_error(estimate: &estimator::DensityEstimate, marks: &MarkDistribution) -> Result<f64> {
    let (lo, hi) = density_support(marks, COVERAGE_PDF_LEVEL)?;
    if lo < estimate.x_grid.start || hi > estimate.x_grid.end() {
        return Err(Error::param(format!(
            "grid [{}, {}] does not cover [{lo}, {hi}] where the density exceeds {COVERAGE_PDF_LEVEL:e}",
            estimate.x_grid.start,
            estimate.x_grid.end()
        )));
    }
    sup_error_window(estimate, marks, f64::NEG_INFINITY, f64::INFINITY)
}

/// Sup error restricted to grid points inside `[lo, hi]`, without any
/// coverage requirement.
pub fn sup_error_window(
    estimate: &estimator::DensityEstimate,
    marks: &MarkDistribution,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, t) in estimate.x.iter().zip(&estimate.theta_hat) {
        if *x < lo || *x > hi {
            continue;
        }
        let pdf = marks
            .pdf(*x)
            .ok_or_else(|| Error::param("a point mass has no density to compare against"))?;
        worst = worst.max((t - pdf).abs());
    }
    Ok(worst)
}

/// Worker pool with `jobs` threads (`None`: one per logical core).
pub fn worker_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    if jobs == Some(0) {
        return Err(Error::param("jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))
}

/// Simulation stream of run `run` at size index `ni`.
pub fn run_stream(ni: usize, run: usize) -> u64 {
    ((ni as u64) << 32) | run as u64
}

/// One replicate: simulate, estimate, and measure the sup error.
pub fn single_run(
    params: &ModelParams,
    marks: &MarkDistribution,
    config: &EstimatorConfig,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    let sample = simulator::simulate_series_stream(
        params,
        marks,
        n,
        params.default_burn_in(),
        seed,
        stream,
    )?;
    let est = estimator::estimate_density(&sample, config)?;
    sup_error(&est, marks)
}

/// For each `n`, `runs` independent replicates of the full pipeline. Run `r`
/// at the `i`-th size uses stream `(i << 32) | r` of `base_seed`, so results
/// do not depend on the number of workers or their scheduling.
pub fn run_table1(
    params: &ModelParams,
    marks: &MarkDistribution,
    config: &EstimatorConfig,
    n_list: &[usize],
    runs: usize,
    base_seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<Vec<McReport>> {
    if runs < 2 {
        return Err(Error::param(format!("need at least 2 runs, got {runs}")));
    }
    config.validate()?;
    if config.x_grid.is_none() {
        return Err(Error::param("the benchmark needs a fixed x_grid"));
    }
    let snapshot = ConfigSnapshot {
        estimator: config.clone(),
        params: *params,
        marks: marks.clone(),
    };
    n_list
        .iter()
        .enumerate()
        .map(|(ni, &n)| {
            let start = Instant::now();
            let errors = pool.install(|| {
                (0..runs)
                    .into_par_iter()
                    .map(|r| single_run(params, marks, config, n, base_seed, run_stream(ni, r)))
                    .collect::<Result<Vec<f64>>>()
            })?;
            Ok(McReport::from_errors(
                n,
                errors,
                snapshot.clone(),
                start.elapsed().as_secs_f64(),
            ))
        })
        .collect()
}

/// Least-squares slope of `log y` on `log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% Student-t interval for the slope; 0 for an
    /// exact fit, infinite with only two points.
    pub half_width: f64,
}

pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::input("x and y lengths differ"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::input("log-log fit needs positive finite values"));
    }
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::input(
            "log-log fit needs at least two distinct x values",
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let half_width = if lx.len() > 2 {
        let rss: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        let df = k - 2.0;
        let t = StudentsT::new(0.0, 1.0, df)
            .map_err(|e| Error::param(e.to_string()))?
            .inverse_cdf(0.975);
        t * (rss / df / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(SlopeFit {
        slope,
        intercept,
        half_width,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub fit: SlopeFit,
    pub reports: Vec<McReport>,
}

/// Table-1 style runs followed by the slope of `log mean_sup_error` on
/// `log n`.
pub fn run_rate_check(
    params: &ModelParams,
    marks: &MarkDistribution,
    config: &EstimatorConfig,
    n_list: &[usize],
    runs: usize,
    base_seed: u64,
    pool: &rayon::ThreadPool,
) -> Result<RateReport> {
    check_distinct(n_list)?;
    let reports = run_table1(params, marks, config, n_list, runs, base_seed, pool)?;
    let fit = slope_of_reports(&reports)?;
    Ok(RateReport { fit, reports })
}

fn check_distinct(n_list: &[usize]) -> Result<()> {
    let mut d = n_list.to_vec();
    d.sort_unstable();
    d.dedup();
    if d.len() < 3 {
        return Err(Error::param(
            "rate check needs at least 3 distinct sample sizes",
        ));
    }
    Ok(())
}

pub fn slope_of_reports(reports: &[McReport]) -> Result<SlopeFit> {
    let ns: Vec<f64> = reports.iter().map(|r| r.n as f64).collect();
    let es: Vec<f64> = reports.iter().map(|r| r.mean_sup_error).collect();
    fit_log_slope(&ns, &es)
}

/// ECF sup-deviation over `|u| <= u_max` and its log-log slope in `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcfRateReport {
    pub fit: SlopeFit,
    pub rows: Vec<ecf::DeviationRow>,
}

pub fn run_ecf_rate_check(
    params: &ModelParams,
    marks: &MarkDistribution,
    setup: &ecf::DeviationSetup,
    n_list: &[usize],
) -> Result<EcfRateReport> {
    check_distinct(n_list)?;
    let rows = ecf::ecf_deviation(params, marks, setup, n_list)?;
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ds: Vec<f64> = rows.iter().map(|r| r.mean_sup_deviation).collect();
    Ok(EcfRateReport {
        fit: fit_log_slope(&ns, &ds)?,
        rows,
    })
}

/// Class constants computed from the mark law itself: `K = E|Y|^{4+m}` and
/// `L` the tail norm of `Re phi_Y`, the smallest values the audit accepts.
pub fn brute_force_smoothness(
    marks: &MarkDistribution,
    s: f64,
    m: f64,
) -> Result<SmoothnessConfig> {
    let k = admissibility::abs_moment(marks, 4.0 + m);
    let l = admissibility::re_cf_tail_norm(marks);
    SmoothnessConfig::new(s, k, l, m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub smoothness: SmoothnessConfig,
    pub admissibility: admissibility::Report,
    pub bound_constant: f64,
    pub u_max: f64,
    pub points: usize,
    /// `min_u |phi_X(u)| - C (1+|u|)^{-ratio}`.
    pub min_slack: f64,
    pub argmin_u: f64,
    pub slack_at_zero: f64,
    pub passed: bool,
    pub n: usize,
    pub seed: u64,
    pub cutoff: f64,
    pub kappa: f64,
    /// Smallest `u > 0` on the grid where the binned ECF modulus drops to
    /// `kappa` or below.
    pub ecf_first_crossing: Option<f64>,
}

impl AuditReport {
    pub fn into_result(self) -> Result<Self> {
        if self.passed {
            Ok(self)
        } else {
            Err(Error::AuditFailure(format!(
                "|phi_X| falls below the lower bound by {:e} at u = {}",
                -self.min_slack, self.argmin_u
            )))
        }
    }
}

/// Checks `|phi_X(u)| >= C (1+|u|)^{-ratio}` on `points` equispaced
/// frequencies in `[-u_max, u_max]`, and locates where a simulated sample's
/// binned ECF first crosses the estimator threshold.
#[allow(clippy::too_many_arguments)]
pub fn run_lower_bound_audit(
    params: &ModelParams,
    marks: &MarkDistribution,
    smoothness: &SmoothnessConfig,
    estimator_config: &EstimatorConfig,
    n: usize,
    seed: u64,
    u_max: f64,
    points: usize,
) -> Result<AuditReport> {
    let report = admissibility::report(marks, smoothness);
    if !report.supports_cf_lower_bound(smoothness) {
        return Err(Error::param(format!(
            "marks do not satisfy the class constraints: E|Y| = {} vs K^(1/(4+m)) = {}, tail norm = {} vs L = {}",
            report.mean_abs,
            smoothness.k.powf(1.0 / (4.0 + smoothness.m)),
            report.re_cf_tail_norm,
            smoothness.l
        )));
    }
    if !(u_max > 0.0) || points < 3 {
        return Err(Error::param("audit needs u_max > 0 and at least 3 points"));
    }
    let half = points / 2;
    let step = u_max / half as f64;
    let us: Vec<f64> = (0..=2 * half)
        .map(|i| (i as f64 - half as f64) * step)
        .collect();
    let phi = model::true_shot_cf_many(params, marks, &us, model::DEFAULT_CF_REL_TOL)?;
    let (mut min_slack, mut argmin_u) = (f64::INFINITY, 0.0);
    for (u, p) in us.iter().zip(&phi) {
        let slack = p.norm() - model::cf_lower_bound(smoothness, params, *u);
        if slack < min_slack {
            min_slack = slack;
            argmin_u = *u;
        }
    }
    let slack_at_zero = phi[half].norm() - model::cf_lower_bound(smoothness, params, 0.0);

    let sample = simulator::simulate_series(params, marks, n, params.default_burn_in(), seed)?;
    let cutoff = estimator_config.resolve_cutoff(n)?;
    let (kappa, _) = estimator_config.resolve_kappa(&sample, cutoff);
    let bw = estimator_config
        .bin_width
        .unwrap_or_else(|| ecf::default_bin_width(&sample.values));
    let hist = ecf::build_histogram(&sample, bw)?;
    let grid = ecf::ecf_from_histogram(&hist, step, half)?;
    let ecf_first_crossing = (half..grid.len())
        .find(|&i| grid.phi[i].norm() <= kappa)
        .map(|i| grid.u(i));

    Ok(AuditReport {
        smoothness: *smoothness,
        admissibility: report,
        bound_constant: smoothness.cf_constant(params.ratio),
        u_max,
        points: us.len(),
        min_slack,
        argmin_u,
        slack_at_zero,
        passed: min_slack >= 0.0,
        n,
        seed,
        cutoff,
        kappa,
        ecf_first_crossing,
    })
}
