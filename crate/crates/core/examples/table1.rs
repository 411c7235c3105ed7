//! Monte-Carlo sup-norm error over several sample sizes.
//!
//! cargo run --release --example table1 [runs]

use shotnoise::bench;
use shotnoise::model::{MarkDistribution, ModelParams};

fn main() -> shotnoise::error::Result<()> {
    let runs: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(10);
    let params = ModelParams::new(100.0, 80.0)?;
    let marks = MarkDistribution::reference_mixture();
    let pool = bench::worker_pool(None)?;

    let reports = bench::run_table1(
        &params,
        &marks,
        &bench::reference_estimator_config(),
        &[10_000, 100_000],
        runs,
        20240611,
        &pool,
    )?;
    bench::write_reports_csv(&reports, std::io::stdout().lock())?;
    for r in &reports {
        println!(
            "n={} se={:.4} ({:.1}s)",
            r.n,
            r.std_error(),
            r.wall_time_seconds
        );
    }
    let fit = bench::slope_of_reports(&reports)?;
    println!("log-log slope {:.3}", fit.slope);
    Ok(())
}
