//! Tail-index estimate of the intensity-to-decay ratio.
//!
//! cargo run --release --example hill

use shotnoise::estimator;
use shotnoise::model::{MarkDistribution, ModelParams};
use shotnoise::simulator;

fn main() -> shotnoise::error::Result<()> {
    let marks = MarkDistribution::exponential(1.0)?;
    for (lambda, alpha) in [(80.0, 80.0), (160.0, 80.0), (100.0, 80.0)] {
        let params = ModelParams::new(lambda, alpha)?;
        let n = 200_000;
        let s = simulator::simulate_series(&params, &marks, n, params.default_burn_in(), 1)?;
        let h = estimator::hill_ratio(&s, estimator::default_hill_k(n))?;
        println!(
            "true ratio {:.3}  hill {:.3}  k={}",
            params.ratio, h.ratio, h.k
        );
    }
    Ok(())
}
