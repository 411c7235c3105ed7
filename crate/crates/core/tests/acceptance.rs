//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Gamma};

use shotnoise::bench::{self, McReport};
use shotnoise::ecf::{self, DeviationSetup, EcfGrid};
use shotnoise::estimator::{self, EstimatorConfig, MarkCfEstimate, XGrid};
use shotnoise::model::{self, MarkDistribution, ModelParams};
use shotnoise::simulator;

const BASE_SEED: u64 = 20240611;
const TABLE1_N: [usize; 3] = [10_000, 100_000, 1_000_000];
const TABLE1_TARGET: [f64; 3] = [0.1015, 0.0741, 0.0622];
const TABLE1_TOL: f64 = 0.035;
const TABLE1_RUNS: usize = 100;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn reference() -> (ModelParams, MarkDistribution) {
    (
        ModelParams::new(100.0, 80.0).unwrap(),
        MarkDistribution::reference_mixture(),
    )
}

fn table1(n_list: &[usize]) -> Vec<McReport> {
    let (params, marks) = reference();
    let pool = bench::worker_pool(None).unwrap();
    bench::run_table1(
        &params,
        &marks,
        &bench::reference_estimator_config(),
        n_list,
        TABLE1_RUNS,
        BASE_SEED,
        &pool,
    )
    .unwrap()
}

fn write_table1(reports: &[McReport], dir: &Path) {
    let mut csv = std::fs::File::create(dir.join("table1.csv")).unwrap();
    bench::write_reports_csv(reports, &mut csv).unwrap();
    let mut runs = std::fs::File::create(dir.join("table1_runs.csv")).unwrap();
    bench::write_per_run_csv(reports, &mut runs).unwrap();
}

fn mode_estimate() -> estimator::DensityEstimate {
    let (params, marks) = reference();
    let sample = simulator::simulate_series(
        &params,
        &marks,
        100_000,
        params.default_burn_in(),
        BASE_SEED,
    )
    .unwrap();
    estimator::estimate_density(&sample, &bench::reference_estimator_config()).unwrap()
}

fn table1_reproduction(reports: &[McReport]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, target) in reports.iter().zip(TABLE1_TARGET) {
        let ok = (r.mean_sup_error - target).abs() <= TABLE1_TOL;
        pass &= ok;
        parts.push(format!(
            "n={} mean={:.4} (target {target} +/- {TABLE1_TOL}, {}) var={:.2e} {:.0}s",
            r.n,
            r.mean_sup_error,
            if ok { "ok" } else { "out" },
            r.variance_sup_error,
            r.wall_time_seconds
        ));
    }
    let decreasing = reports
        .windows(2)
        .all(|w| w[1].mean_sup_error < w[0].mean_sup_error);
    parts.push(format!("strictly decreasing: {decreasing}"));
    verdict(pass && decreasing, parts.join("; "))
}

fn mode_recovery(est: &estimator::DensityEstimate) -> Verdict {
    let maxima = est.local_maxima(0.02);
    let targets = [4.0, 12.0, 22.0];
    let ok = maxima.len() == 3
        && maxima
            .iter()
            .zip(targets)
            .all(|((x, _), t)| (x - t).abs() <= 0.5);
    let found: Vec<String> = maxima
        .iter()
        .map(|(x, h)| format!("{x:.2} (height {h:.3})"))
        .collect();
    verdict(
        ok,
        format!(
            "local maxima above 0.02: [{}], expected within 0.5 of 4, 12, 22",
            found.join(", ")
        ),
    )
}

fn gamma_marginal() -> Verdict {
    let params = ModelParams::new(160.0, 80.0).unwrap();
    let marks = MarkDistribution::exponential(1.0).unwrap();
    let n = 100_000;
    let s = simulator::simulate_series(&params, &marks, n, params.default_burn_in(), BASE_SEED)
        .unwrap();
    let mut v = s.values.clone();
    v.sort_by(f64::total_cmp);
    let gamma = Gamma::new(2.0, 1.0).unwrap();
    let ks = v
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = gamma.cdf(*x);
            (f - i as f64 / n as f64)
                .abs()
                .max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    // Asymptotic Kolmogorov quantile at level 0.01.
    let critical = 1.6276 / (n as f64).sqrt();

    let mut worst = 0.0f64;
    let us: Vec<f64> = (-500..=500).map(|i| i as f64 * 0.1).collect();
    let phi = model::true_shot_cf_many(&params, &marks, &us, model::DEFAULT_CF_REL_TOL).unwrap();
    for (u, p) in us.iter().zip(&phi) {
        let exact = Complex64::new(1.0, -u).powf(-2.0);
        worst = worst.max((p - exact).norm() / exact.norm());
    }
    verdict(
        ks < critical && worst <= 1e-6,
        format!("KS distance {ks:.5} vs critical {critical:.5}; max relative CF error {worst:.2e} on |u| <= 50"),
    )
}

fn histogram_bounds() -> Verdict {
    let mut rng = simulator::stream_rng(BASE_SEED, 4);
    let mut violations = 0;
    let mut worst_value = 0.0f64;
    let mut worst_deriv = 0.0f64;
    for t in 0..200u64 {
        let lambda = rng.random_range(0.2..5.0);
        let alpha = rng.random_range(0.2..3.0);
        let marks = if t % 2 == 0 {
            MarkDistribution::exponential(rng.random_range(0.5..2.0)).unwrap()
        } else {
            MarkDistribution::reference_mixture()
        };
        let n = rng.random_range(50..2000);
        let params = ModelParams::new(lambda, alpha).unwrap();
        let s = simulator::simulate_series_stream(
            &params,
            &marks,
            n,
            params.default_burn_in(),
            BASE_SEED,
            1000 + t,
        )
        .unwrap();
        let bw = 10f64.powf(rng.random_range(-3.0..0.0));
        let mut u: f64 = rng.random_range(-10.0..10.0);
        if u == 0.0 {
            u = 1.0;
        }
        let hist = ecf::build_histogram(&s, bw).unwrap();
        let grid = ecf::ecf_from_histogram(&hist, u.abs(), 1).unwrap();
        let idx = if u > 0.0 { 2 } else { 0 };
        let (phi, dphi) = ecf::ecf_direct(&s, u);
        let ev = (grid.phi[idx] - phi).norm();
        let ed = (grid.phi_prime[idx] - dphi).norm();
        let (bv, bd) = (hist.value_bound(u), hist.derivative_bound(u));
        worst_value = worst_value.max(ev / bv);
        worst_deriv = worst_deriv.max(ed / bd);
        if ev > bv || ed > bd {
            violations += 1;
        }
    }
    verdict(
        violations == 0,
        format!("{violations} violations in 200 triples; largest error/bound ratios {worst_value:.3} (value), {worst_deriv:.3} (derivative)"),
    )
}

fn ecf_rate() -> Verdict {
    let params = ModelParams::new(2.0, 1.0).unwrap();
    let marks = MarkDistribution::exponential(1.0).unwrap();
    let setup = DeviationSetup {
        u_max: 5.0,
        grid_half_count: 200,
        replicates: 50,
        base_seed: BASE_SEED,
    };
    let r = bench::run_ecf_rate_check(&params, &marks, &setup, &[1_000, 10_000, 100_000]).unwrap();
    let means: Vec<String> = r
        .rows
        .iter()
        .map(|row| format!("n={}: {:.5}", row.n, row.mean_sup_deviation))
        .collect();
    verdict(
        (-0.6..=-0.4).contains(&r.fit.slope),
        format!(
            "slope {:.4} (+/- {:.4}) in [-0.6, -0.4]; {}",
            r.fit.slope,
            r.fit.half_width,
            means.join(", ")
        ),
    )
}

fn convergence_slope(reports: &[McReport]) -> Verdict {
    let fit = bench::slope_of_reports(reports).unwrap();
    verdict(
        (-0.2..=-0.04).contains(&fit.slope),
        format!("slope {:.4} in [-0.2, -0.04]", fit.slope),
    )
}

fn lower_bound_audit() -> Verdict {
    let cases = [
        (
            "exponential",
            ModelParams::new(1.0, 1.0).unwrap(),
            MarkDistribution::exponential(1.0).unwrap(),
        ),
        ("mixture", reference().0, reference().1),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, params, marks) in cases {
        let smooth = bench::brute_force_smoothness(&marks, 1.0, 1.0).unwrap();
        let cfg = EstimatorConfig::theorem(params.ratio, 1.0);
        let r = bench::run_lower_bound_audit(
            &params, &marks, &smooth, &cfg, 10_000, BASE_SEED, 8.0, 1601,
        )
        .unwrap();
        pass &= r.passed && r.min_slack >= 0.0;
        parts.push(format!(
            "{name}: K={:.4} L={:.4} C={:.3e} min slack {:.3e} at u={:.3}",
            smooth.k, smooth.l, r.bound_constant, r.min_slack, r.argmin_u
        ));
    }
    verdict(pass, parts.join("; "))
}

fn hill_ratio() -> Verdict {
    let params = ModelParams::new(160.0, 80.0).unwrap();
    let marks = MarkDistribution::exponential(1.0).unwrap();
    let n = 1_000_000;
    let s = simulator::simulate_series(&params, &marks, n, params.default_burn_in(), BASE_SEED)
        .unwrap();
    let k = estimator::default_hill_k(n);
    let est = estimator::hill_ratio(&s, k).unwrap();
    verdict(
        (est.ratio - 2.0).abs() <= 0.2 * 2.0,
        format!(
            "estimate {:.4} with k={k}, required within 20% of 2",
            est.ratio
        ),
    )
}

fn plug_in_exactness() -> Verdict {
    let params = ModelParams::new(1.25, 1.0).unwrap();
    let marks = MarkDistribution::gaussian_mixture(vec![1.0], vec![0.0], vec![1.0]).unwrap();
    let grid = XGrid::spanning(-6.0, 6.0, 1201).unwrap();
    let mut errs = Vec::new();
    for cutoff in [4.0, 8.0, 16.0] {
        let half = estimator::DEFAULT_U_POINTS;
        let du = cutoff / half as f64;
        let us: Vec<f64> = (0..=2 * half)
            .map(|j| (j as f64 - half as f64) * du)
            .collect();
        let phi = model::true_shot_cf_many(&params, &marks, &us, 1e-10).unwrap();
        let dphi = us
            .iter()
            .zip(&phi)
            .map(|(u, p)| model::true_shot_cf_derivative(&params, &marks, *u, *p))
            .collect();
        let exact = EcfGrid {
            u_step: du,
            half_count: half,
            phi: phi.clone(),
            phi_prime: dphi,
        };
        let kappa = 0.5 * phi.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
        let cf: MarkCfEstimate = estimator::mark_cf_estimate(&exact, params.ratio, kappa).unwrap();
        let est = estimator::invert_density(&cf, cutoff, &grid).unwrap();
        errs.push(bench::sup_error(&est, &marks).unwrap());
    }
    let ok = errs[1] <= 2e-3 && errs[0] > errs[1] && errs[1] > errs[2];
    verdict(
        ok,
        format!(
            "sup errors at cutoff 4, 8, 16: {:.3e}, {:.3e}, {:.3e}",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn determinism(first: &[McReport], first_density: &estimator::DensityEstimate) -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    // The 10^6 tier is not rerun.
    write_table1(&first[..2], a.path());
    write_table1(&table1(&TABLE1_N[..2]), b.path());
    let mut d1 = Vec::new();
    first_density.write_csv(&mut d1).unwrap();
    let mut d2 = Vec::new();
    mode_estimate().write_csv(&mut d2).unwrap();
    let mut same = d1 == d2;
    for f in ["table1.csv", "table1_runs.csv"] {
        same &=
            std::fs::read(a.path().join(f)).unwrap() == std::fs::read(b.path().join(f)).unwrap();
    }
    verdict(
        same,
        "rerun of the n=10^4 and n=10^5 tiers and of the mode-recovery estimate is byte-identical"
            .to_string(),
    )
}

fn check(id: u32, name: &str, failures: &mut Vec<u32>, f: impl FnOnce() -> Verdict) {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (
            false,
            format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .map(String::as_str)
                    .or(e.downcast_ref::<&str>().copied())
                    .unwrap_or("?")
            ),
        ),
    };
    println!(
        "criterion {id:>2} [{}] {name}: {detail} ({secs:.1}s)",
        if pass { "PASS" } else { "FAIL" }
    );
    if !pass {
        failures.push(id);
    }
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let mut failures = Vec::new();
    check(9, "plug-in exactness", &mut failures, plug_in_exactness);
    check(4, "histogram ECF bounds", &mut failures, histogram_bounds);
    check(3, "Gamma marginal", &mut failures, gamma_marginal);
    check(7, "CF lower-bound audit", &mut failures, lower_bound_audit);
    check(8, "Hill ratio", &mut failures, hill_ratio);
    check(5, "ECF deviation rate", &mut failures, ecf_rate);

    let mut density = None;
    check(2, "mode recovery", &mut failures, || {
        let est = mode_estimate();
        let v = mode_recovery(&est);
        density = Some(est);
        v
    });
    let mut reports = None;
    check(1, "Monte-Carlo error table", &mut failures, || {
        let r = table1(&TABLE1_N);
        let v = table1_reproduction(&r);
        reports = Some(r);
        v
    });
    check(6, "convergence-rate slope", &mut failures, || {
        convergence_slope(reports.as_deref().expect("criterion 1 produced reports"))
    });
    check(10, "determinism", &mut failures, || {
        determinism(
            reports.as_deref().expect("criterion 1 produced reports"),
            density.as_ref().expect("criterion 2 produced an estimate"),
        )
    });

    failures.sort_unstable();
    if failures.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failures:?}");
        std::process::exit(1);
    }
}
