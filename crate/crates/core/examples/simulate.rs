//! Simulates the sampled process and a stretch of the continuous path.
//!
//! cargo run --release --example simulate

use shotnoise::model::{MarkDistribution, ModelParams};
use shotnoise::simulator;

fn main() -> shotnoise::error::Result<()> {
    let params = ModelParams::new(100.0, 80.0)?;
    let marks = MarkDistribution::reference_mixture();

    let series = simulator::simulate_series(&params, &marks, 10_000, params.default_burn_in(), 7)?;
    let (mean, var) = shotnoise::mean_and_variance(&series.values);
    println!("n={} mean={mean:.4} var={var:.4}", series.len());
    // mean of X is ratio * E[Y]
    println!("expected mean {:.4}", params.ratio * marks.mean());

    let trace = simulator::simulate_trace(&params, &marks, 0.2, 0.001, 7)?;
    println!(
        "{} arrivals on [0, 0.2], start level {:.3}",
        trace.times.len(),
        trace.initial
    );
    for (t, x) in trace.path_grid.iter().zip(&trace.path_values).step_by(50) {
        println!("{t:.3} {x:.3}");
    }
    Ok(())
}
