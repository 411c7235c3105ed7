#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ecf;
pub mod error;
pub mod model;
pub mod simulator;

pub mod bench;
pub mod cli;
mod czt;
pub mod estimator;
mod quad;

pub use error::{Error, Result};

/// Formats a float with 17 significant digits so text outputs round-trip
/// and compare byte-for-byte between runs.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Mean and unbiased sample variance (variance 0 for fewer than two values).
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = ecf::neumaier_sum(values.iter().copied()) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = ecf::neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, ss / (n - 1) as f64)
}
