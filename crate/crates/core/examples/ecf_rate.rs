//! Sup deviation of the empirical characteristic function on |u| <= 5
//! against the exact one, and its decay in n.
//!
//! cargo run --release --example ecf_rate

use shotnoise::bench;
use shotnoise::ecf::DeviationSetup;
use shotnoise::model::{MarkDistribution, ModelParams};

fn main() -> shotnoise::error::Result<()> {
    let params = ModelParams::new(2.0, 1.0)?;
    let marks = MarkDistribution::exponential(1.0)?;
    let setup = DeviationSetup {
        u_max: 5.0,
        grid_half_count: 200,
        replicates: 20,
        base_seed: 11,
    };
    let r = bench::run_ecf_rate_check(&params, &marks, &setup, &[1_000, 4_000, 16_000])?;
    for row in &r.rows {
        println!(
            "n={:>6} mean={:.5} se={:.5}",
            row.n, row.mean_sup_deviation, row.std_error
        );
    }
    println!("slope {:.3} +/- {:.3}", r.fit.slope, r.fit.half_width);
    Ok(())
}
