//! Evaluation of `sum_k a_k exp(i theta j k)` on `j = 0..count` for an
//! arbitrary angular step `theta`, through FFT convolution (chirp-z).

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Largest transform length accepted anywhere in the crate.
pub const MAX_FFT_LEN: usize = 1 << 28;

fn chirp(theta: f64, k: usize) -> Complex64 {
    let k = k as f64;
    Complex64::from_polar(1.0, 0.5 * theta * k * k)
}

/// Chirp-z transform: `out[j] = sum_k input[k] exp(i theta j k)`.
pub fn chirp_z(input: &[Complex64], theta: f64, count: usize) -> Result<Vec<Complex64>> {
    if input.is_empty() || count == 0 {
        return Ok(vec![Complex64::new(0.0, 0.0); count]);
    }
    let len = (input.len() + count - 1).next_power_of_two();
    if len > MAX_FFT_LEN {
        return Err(Error::Resource(format!(
            "chirp-z transform needs {len} points, above the cap of {MAX_FFT_LEN}"
        )));
    }
    // jk = (j^2 + k^2 - (j-k)^2) / 2
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    for (k, a) in input.iter().enumerate() {
        b[k] = a * chirp(theta, k);
    }
    let mut d = vec![Complex64::new(0.0, 0.0); len];
    for (k, slot) in d.iter_mut().enumerate().take(count) {
        *slot = chirp(theta, k).conj();
    }
    for k in 1..input.len() {
        d[len - k] = chirp(theta, k).conj();
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut b);
    fwd.process(&mut d);
    for (x, y) in b.iter_mut().zip(&d) {
        *x *= y;
    }
    inv.process(&mut b);
    let scale = 1.0 / len as f64;
    Ok((0..count).map(|j| b[j] * scale * chirp(theta, j)).collect())
}

/// `out[j] = sum_k input[k] exp(2 pi i j k / len)` for `j = 0..count`, with
/// `input` folded modulo `len` when it is longer.
pub fn periodic_sum(input: &[Complex64], len: usize, count: usize) -> Result<Vec<Complex64>> {
    if len == 0 || len > MAX_FFT_LEN {
        return Err(Error::Resource(format!(
            "FFT length {len} outside 1..={MAX_FFT_LEN}"
        )));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (k, a) in input.iter().enumerate() {
        buf[k % len] += a;
    }
    FftPlanner::<f64>::new()
        .plan_fft_inverse(len)
        .process(&mut buf);
    Ok((0..count).map(|j| buf[j % len]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(input: &[Complex64], theta: f64, count: usize) -> Vec<Complex64> {
        (0..count)
            .map(|j| {
                input
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * Complex64::from_polar(1.0, theta * (j * k) as f64))
                    .sum()
            })
            .collect()
    }

    #[test]
    fn chirp_z_matches_naive_sum() {
        let input: Vec<Complex64> = (0..97)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k % 5) as f64 * 0.1))
            .collect();
        for theta in [0.0123, -0.5, 1.7, 1e-5] {
            let got = chirp_z(&input, theta, 61).unwrap();
            let want = naive(&input, theta, 61);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < 1e-11, "theta={theta} {g} {w}");
            }
        }
    }

    #[test]
    fn periodic_sum_matches_naive_sum_with_folding() {
        let input: Vec<Complex64> = (0..40)
            .map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.0))
            .collect();
        let len = 16;
        let got = periodic_sum(&input, len, 35).unwrap();
        let want = naive(&input, 2.0 * std::f64::consts::PI / len as f64, 35);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }
}
