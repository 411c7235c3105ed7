//! Recovers the mark density of the three-component mixture from one sample.
//!
//! cargo run --release --example estimate_density [n]

use shotnoise::bench;
use shotnoise::estimator;
use shotnoise::model::{MarkDistribution, ModelParams};
use shotnoise::simulator;

fn main() -> shotnoise::error::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(100_000);
    let params = ModelParams::new(100.0, 80.0)?;
    let marks = MarkDistribution::reference_mixture();
    let sample =
        simulator::simulate_series(&params, &marks, n, params.default_burn_in(), 20240611)?;

    let est = estimator::estimate_density(&sample, &bench::reference_estimator_config())?;
    let d = &est.diagnostics;
    println!(
        "cutoff={:.4} thresholded={:.3} min|ecf|={:.3e}",
        est.cutoff, d.fraction_thresholded, d.min_abs_ecf
    );
    if let Some(w) = &d.warning {
        eprintln!("warning: {w}");
    }
    println!("sup error {:.4}", bench::sup_error(&est, &marks)?);
    for (x, h) in est.local_maxima(0.02) {
        println!("mode at {x:.2}, height {h:.4}");
    }

    let mut out = std::io::stdout().lock();
    if std::env::var_os("DUMP").is_some() {
        est.write_csv(&mut out)?;
    }
    Ok(())
}
