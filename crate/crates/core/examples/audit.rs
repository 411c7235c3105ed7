//! Checks the characteristic-function lower bound on a grid, with K and L
//! computed from the mark law.
//!
//! cargo run --release --example audit

use shotnoise::bench;
use shotnoise::estimator::EstimatorConfig;
use shotnoise::model::{MarkDistribution, ModelParams};

fn main() -> shotnoise::error::Result<()> {
    let params = ModelParams::new(100.0, 80.0)?;
    let marks = MarkDistribution::reference_mixture();
    let smooth = bench::brute_force_smoothness(&marks, 1.0, 1.0)?;
    let cfg = EstimatorConfig::theorem(params.ratio, 1.0);

    let r = bench::run_lower_bound_audit(&params, &marks, &smooth, &cfg, 10_000, 3, 8.0, 1601)?;
    println!(
        "K={:.1} L={:.4} C={:.3e}",
        smooth.k, smooth.l, r.bound_constant
    );
    println!("min slack {:.3e} at u={:.3}", r.min_slack, r.argmin_u);
    println!("{}", if r.passed { "pass" } else { "FAIL" });
    r.into_result().map(|_| ())
}
