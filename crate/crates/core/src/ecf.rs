//! Empirical characteristic function of a sample and its derivative.
//!
//! Two routes are provided: exact summation over the observations, and the
//! binned approximation
//!
//! ```text
//! phi_h(u)  = sum_l H(l) exp(i u h (l + 1/2))
//! phi_h'(u) = sum_l H(l) i h (l + 1/2) exp(i u h (l + 1/2))
//! ```
//!
//! which costs one FFT per grid regardless of the sample size. For every `u`
//! the binned values stay within `h|u|/2` (value) and
//! `h/2 (1 + |u| h sum_l H(l)(l + 1/2))` (derivative) of the exact ones.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::czt::{self, MAX_FFT_LEN};
use crate::error::{Error, Result};
use crate::model::{self, MarkDistribution, ModelParams};
use crate::simulator::{self, SampleSeries};

/// Neumaier-compensated sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, Default)]
struct CompensatedComplex {
    re: [f64; 2],
    im: [f64; 2],
}

impl CompensatedComplex {
    fn add_part(acc: &mut [f64; 2], v: f64) {
        let t = acc[0] + v;
        if acc[0].abs() >= v.abs() {
            acc[1] += (acc[0] - t) + v;
        } else {
            acc[1] += (v - t) + acc[0];
        }
        acc[0] = t;
    }

    fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, z.re);
        Self::add_part(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re[0] + self.re[1], self.im[0] + self.im[1])
    }
}

/// `(phi_n(u), phi_n'(u))` by compensated summation over the sample.
pub fn ecf_direct(sample: &SampleSeries, u: f64) -> (Complex64, Complex64) {
    ecf_direct_values(&sample.values, u)
}

pub fn ecf_direct_values(values: &[f64], u: f64) -> (Complex64, Complex64) {
    let mut phi = CompensatedComplex::default();
    let mut dphi = CompensatedComplex::default();
    for &x in values {
        let e = Complex64::from_polar(1.0, u * x);
        phi.add(e);
        dphi.add(Complex64::new(0.0, x) * e);
    }
    let n = values.len() as f64;
    (phi.value() / n, dphi.value() / n)
}

/// Normalized histogram on the grid `{bin_width * l}`.
///
/// Bins are `[l h, (l+1) h)` except the last, which is closed on the right,
/// so every observation lands in exactly one bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub l_min: i64,
    pub l_max: i64,
    pub mass: Vec<f64>,
}

impl Histogram {
    /// Midpoint `h (l + 1/2)` of bin `l`.
    pub fn center(&self, l: i64) -> f64 {
        self.bin_width * (l as f64 + 0.5)
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (self.l_min..=self.l_max).map(|l| self.center(l))
    }

    /// `sum_l H(l) (l + 1/2)`, the quantity in the derivative bound.
    pub fn mean_index(&self) -> f64 {
        neumaier_sum(
            self.mass
                .iter()
                .zip(self.l_min..=self.l_max)
                .map(|(m, l)| m * (l as f64 + 0.5)),
        )
    }

    /// Upper bound on `|phi_h(u) - phi_n(u)|`.
    pub fn value_bound(&self, u: f64) -> f64 {
        0.5 * self.bin_width * u.abs()
    }

    /// Upper bound on `|phi_h'(u) - phi_n'(u)|`, with the sum taken in
    /// absolute value so the bound also covers negative observations.
    pub fn derivative_bound(&self, u: f64) -> f64 {
        let weighted = neumaier_sum(
            self.mass
                .iter()
                .zip(self.l_min..=self.l_max)
                .map(|(m, l)| m * (l as f64 + 0.5).abs()),
        );
        0.5 * self.bin_width * (1.0 + u.abs() * self.bin_width * weighted)
    }
}

/// Bin width giving roughly 4096 bins over the sample range.
pub fn default_bin_width(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let range = hi - lo;
    if range > 0.0 {
        range / 4096.0
    } else {
        1e-6 * lo.abs().max(1.0)
    }
}

pub fn build_histogram(sample: &SampleSeries, bin_width: f64) -> Result<Histogram> {
    build_histogram_values(&sample.values, bin_width)
}

pub fn build_histogram_values(values: &[f64], bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::param(format!(
            "bin_width must be finite and > 0, got {bin_width}"
        )));
    }
    if values.is_empty() {
        return Err(Error::input("cannot bin an empty sample"));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::input("sample contains non-finite values"));
    }
    let l_min = (lo / bin_width).floor() as i64;
    // A constant sample sitting on a grid edge still needs one bin.
    let l_max = (((hi / bin_width).ceil() as i64) - 1).max(l_min);
    let bins = (l_max - l_min + 1) as u64;
    if bins > MAX_FFT_LEN as u64 {
        return Err(Error::Resource(format!("histogram would need {bins} bins")));
    }
    let mut counts = vec![0u64; bins as usize];
    for &x in values {
        let l = ((x / bin_width).floor() as i64).clamp(l_min, l_max);
        counts[(l - l_min) as usize] += 1;
    }
    let n = values.len() as f64;
    Ok(Histogram {
        bin_width,
        l_min,
        l_max,
        mass: counts.into_iter().map(|c| c as f64 / n).collect(),
    })
}

/// Characteristic function and derivative on `u = j * u_step`,
/// `j = -half_count..=half_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct EcfGrid {
    pub u_step: f64,
    pub half_count: usize,
    pub phi: Vec<Complex64>,
    pub phi_prime: Vec<Complex64>,
}

impl EcfGrid {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Frequency of storage index `idx`.
    pub fn u(&self, idx: usize) -> f64 {
        (idx as f64 - self.half_count as f64) * self.u_step
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.u(i)).collect()
    }

    /// Largest frequency on the grid.
    pub fn u_max(&self) -> f64 {
        self.half_count as f64 * self.u_step
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "u,re_phi,im_phi,re_dphi,im_dphi")?;
        for i in 0..self.len() {
            let (p, d) = (self.phi[i], self.phi_prime[i]);
            writeln!(
                out,
                "{},{},{},{},{}",
                crate::fmt_f64(self.u(i)),
                crate::fmt_f64(p.re),
                crate::fmt_f64(p.im),
                crate::fmt_f64(d.re),
                crate::fmt_f64(d.im)
            )?;
        }
        Ok(())
    }
}

fn check_grid(u_step: f64, half_count: usize) -> Result<()> {
    if !(u_step > 0.0) || !u_step.is_finite() {
        return Err(Error::param(format!(
            "u_step must be finite and > 0, got {u_step}"
        )));
    }
    if half_count == 0 {
        return Err(Error::param("half_count must be at least 1"));
    }
    Ok(())
}

/// `sum_k a_k exp(i theta j k)` for `j = -half..=half`.
fn symmetric_transform(a: &[Complex64], theta: f64, half: usize) -> Result<Vec<Complex64>> {
    let count = 2 * half + 1;
    let period = 2.0 * PI / theta;
    let rounded = period.round();
    // The chirp-z length is about twice this; beyond that the exact
    // periodic FFT only costs more.
    let chirp_len = 2 * (a.len() + count);
    if rounded >= 1.0 && (period - rounded).abs() <= 1e-9 * period && rounded <= chirp_len as f64 {
        // Zero-padded FFT whose bin spacing is exactly theta.
        let len = rounded as usize;
        let full = czt::periodic_sum(a, len, len)?;
        Ok((0..count)
            .map(|i| {
                let j = i as i64 - half as i64;
                full[j.rem_euclid(len as i64) as usize]
            })
            .collect())
    } else {
        // Shift j -> j + half so the transform runs over 0..count.
        let shifted: Vec<Complex64> = a
            .iter()
            .enumerate()
            .map(|(k, v)| v * Complex64::from_polar(1.0, -theta * half as f64 * k as f64))
            .collect();
        czt::chirp_z(&shifted, theta, count)
    }
}

/// Binned ECF and derivative on a symmetric grid.
pub fn ecf_from_histogram(hist: &Histogram, u_step: f64, half_count: usize) -> Result<EcfGrid> {
    check_grid(u_step, half_count)?;
    let theta = u_step * hist.bin_width;
    let origin = hist.center(hist.l_min);
    let mass: Vec<Complex64> = hist.mass.iter().map(|m| Complex64::new(*m, 0.0)).collect();
    let weighted: Vec<Complex64> = hist
        .mass
        .iter()
        .zip(hist.centers())
        .map(|(m, c)| Complex64::new(m * c, 0.0))
        .collect();
    let s0 = symmetric_transform(&mass, theta, half_count)?;
    let s1 = symmetric_transform(&weighted, theta, half_count)?;

    let mut phi = Vec::with_capacity(s0.len());
    let mut phi_prime = Vec::with_capacity(s0.len());
    for (i, (a, b)) in s0.iter().zip(&s1).enumerate() {
        let u = (i as f64 - half_count as f64) * u_step;
        let shift = Complex64::from_polar(1.0, u * origin);
        phi.push(a * shift);
        phi_prime.push(Complex64::new(0.0, 1.0) * b * shift);
    }
    phi[half_count] = Complex64::new(neumaier_sum(hist.mass.iter().copied()), 0.0);
    phi_prime[half_count] = Complex64::new(0.0, neumaier_sum(weighted.iter().map(|w| w.re)));
    Ok(EcfGrid {
        u_step,
        half_count,
        phi,
        phi_prime,
    })
}

/// Exact ECF on a symmetric grid. Uses a phase recurrence re-anchored every
/// 32 steps, and blockwise compensated accumulation.
pub fn ecf_direct_grid(values: &[f64], u_step: f64, half_count: usize) -> Result<EcfGrid> {
    check_grid(u_step, half_count)?;
    if values.is_empty() {
        return Err(Error::input("cannot evaluate the ECF of an empty sample"));
    }
    const BLOCK: usize = 512;
    const ANCHOR: usize = 32;
    let m = half_count + 1;
    let mut phi_acc = vec![CompensatedComplex::default(); m];
    let mut dphi_acc = vec![CompensatedComplex::default(); m];
    let mut phi_blk = vec![Complex64::new(0.0, 0.0); m];
    let mut xphi_blk = vec![Complex64::new(0.0, 0.0); m];
    for chunk in values.chunks(BLOCK) {
        phi_blk
            .iter_mut()
            .for_each(|z| *z = Complex64::new(0.0, 0.0));
        xphi_blk
            .iter_mut()
            .for_each(|z| *z = Complex64::new(0.0, 0.0));
        for &x in chunk {
            let step = Complex64::from_polar(1.0, u_step * x);
            let mut e = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if j % ANCHOR == 0 {
                    e = Complex64::from_polar(1.0, j as f64 * u_step * x);
                }
                phi_blk[j] += e;
                xphi_blk[j] += e * x;
                e *= step;
            }
        }
        for j in 0..m {
            phi_acc[j].add(phi_blk[j]);
            dphi_acc[j].add(xphi_blk[j]);
        }
    }
    let n = values.len() as f64;
    let pos_phi: Vec<Complex64> = phi_acc.iter().map(|a| a.value() / n).collect();
    let pos_dphi: Vec<Complex64> = dphi_acc
        .iter()
        .map(|a| Complex64::new(0.0, 1.0) * a.value() / n)
        .collect();
    let mut phi = Vec::with_capacity(2 * half_count + 1);
    let mut phi_prime = Vec::with_capacity(2 * half_count + 1);
    // Real observations: phi(-u) = conj phi(u), phi'(-u) = -conj phi'(u).
    for j in (1..=half_count).rev() {
        phi.push(pos_phi[j].conj());
        phi_prime.push(-pos_dphi[j].conj());
    }
    phi.extend_from_slice(&pos_phi);
    phi_prime.extend_from_slice(&pos_dphi);
    Ok(EcfGrid {
        u_step,
        half_count,
        phi,
        phi_prime,
    })
}

/// Sup-deviation statistics for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub n: usize,
    pub replicates: usize,
    pub mean_sup_deviation: f64,
    pub std_error: f64,
    pub per_replicate: Vec<f64>,
}

/// Settings of [`ecf_deviation`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSetup {
    pub u_max: f64,
    pub grid_half_count: usize,
    pub replicates: usize,
    pub base_seed: u64,
}

/// For each `n`, the mean over independent replicates of
/// `sup_{|u| <= u_max} |phi_n(u) - phi_X(u)|`, with `phi_X` from quadrature.
pub fn ecf_deviation(
    params: &ModelParams,
    marks: &MarkDistribution,
    setup: &DeviationSetup,
    n_list: &[usize],
) -> Result<Vec<DeviationRow>> {
    if !(setup.u_max > 0.0) || setup.grid_half_count == 0 || setup.replicates == 0 {
        return Err(Error::param(
            "u_max, grid size and replicate count must be positive",
        ));
    }
    let u_step = setup.u_max / setup.grid_half_count as f64;
    let us: Vec<f64> = (0..=2 * setup.grid_half_count)
        .map(|i| (i as f64 - setup.grid_half_count as f64) * u_step)
        .collect();
    let truth = model::true_shot_cf_many(params, marks, &us, model::DEFAULT_CF_REL_TOL)?;
    let burn_in = params.default_burn_in();

    let mut rows = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let per_replicate = (0..setup.replicates)
            .map(|r| {
                let stream = ((ni as u64) << 32) | r as u64;
                let series = simulator::simulate_series_stream(
                    params,
                    marks,
                    n,
                    burn_in,
                    setup.base_seed,
                    stream,
                )?;
                let grid = ecf_direct_grid(&series.values, u_step, setup.grid_half_count)?;
                Ok(grid
                    .phi
                    .iter()
                    .zip(&truth)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, var) = crate::mean_and_variance(&per_replicate);
        rows.push(DeviationRow {
            n,
            replicates: setup.replicates,
            mean_sup_deviation: mean,
            std_error: (var / setup.replicates as f64).sqrt(),
            per_replicate,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::simulate_series;
    use proptest::prelude::*;

    fn series(values: Vec<f64>) -> SampleSeries {
        let p = ModelParams::new(1.0, 1.0).unwrap();
        SampleSeries::from_observations(values, p, MarkDistribution::exponential(1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn direct_constant_sample() {
        let c = 1.7;
        let s = series(vec![c; 10]);
        for u in [-3.0, 0.0, 0.4, 9.0] {
            let (p, d) = ecf_direct(&s, u);
            let e = Complex64::from_polar(1.0, u * c);
            assert!((p - e).norm() < 1e-15);
            assert!((d - Complex64::new(0.0, c) * e).norm() < 1e-14);
        }
    }

    #[test]
    fn direct_at_zero_and_two_point_sample() {
        let s = series(vec![0.5, 2.0, -1.0, 3.5]);
        let (p, d) = ecf_direct(&s, 0.0);
        assert_eq!(p, Complex64::new(1.0, 0.0));
        assert!((d - Complex64::new(0.0, 1.25)).norm() < 1e-15);

        // (e^{i pi/2} + e^{-i pi/2})/2 = 0, (i e^{i pi/2} - i e^{-i pi/2})/2 = -1.
        let s = series(vec![1.0, -1.0]);
        let (p, d) = ecf_direct(&s, PI / 2.0);
        assert!(p.norm() < 1e-15);
        assert!((d - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn histogram_examples() {
        let h = build_histogram_values(&[3.3; 5], 0.5).unwrap();
        assert_eq!(h.mass, vec![1.0]);
        assert!(h.center(h.l_min) - 0.25 <= 3.3 && 3.3 < h.center(h.l_min) + 0.25);

        let h = build_histogram_values(&[2.0; 3], 0.5).unwrap();
        assert_eq!((h.l_min, h.l_max, h.mass.clone()), (4, 4, vec![1.0]));

        let h = build_histogram_values(&[0.1, 0.9, 1.1], 1.0).unwrap();
        assert_eq!((h.l_min, h.l_max), (0, 1));
        assert!((h.mass[0] - 2.0 / 3.0).abs() < 1e-15 && (h.mass[1] - 1.0 / 3.0).abs() < 1e-15);

        // Right edge of the range is closed.
        let h = build_histogram_values(&[0.0, 1.0, 2.0], 1.0).unwrap();
        assert_eq!((h.l_min, h.l_max), (0, 1));
        assert_eq!(h.mass.len(), 2);
        assert!((h.mass[1] - 2.0 / 3.0).abs() < 1e-15);

        assert!(build_histogram_values(&[1.0], 0.0).is_err());
    }

    #[test]
    fn histogram_mass_normalized_for_uniform_points() {
        use rand::Rng;
        let mut rng = simulator::stream_rng(3, 0);
        let values: Vec<f64> = (0..1_000_000)
            .map(|_| rng.random::<f64>() * 10.0 - 3.0)
            .collect();
        for bw in [0.01, 0.37, 2.5] {
            let h = build_histogram_values(&values, bw).unwrap();
            assert!((neumaier_sum(h.mass.iter().copied()) - 1.0).abs() <= 1e-12);
            assert_eq!(
                h.l_min,
                (values.iter().cloned().fold(f64::INFINITY, f64::min) / bw).floor() as i64
            );
        }
    }

    #[test]
    fn single_bin_gives_pure_phase() {
        let h = Histogram {
            bin_width: 0.2,
            l_min: 7,
            l_max: 7,
            mass: vec![1.0],
        };
        let c = h.center(7);
        let g = ecf_from_histogram(&h, 0.013, 300).unwrap();
        for i in 0..g.len() {
            let want = Complex64::from_polar(1.0, g.u(i) * c);
            assert!((g.phi[i] - want).norm() < 1e-10);
            assert!((g.phi_prime[i] - Complex64::new(0.0, c) * want).norm() < 1e-9);
        }
    }

    fn naive_binned(h: &Histogram, u: f64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for (m, c) in h.mass.iter().zip(h.centers()) {
            let e = Complex64::from_polar(1.0, u * c);
            p += m * e;
            d += m * Complex64::new(0.0, c) * e;
        }
        (p, d)
    }

    #[test]
    fn fft_and_chirp_paths_match_defining_sum() {
        use rand::Rng;
        let mut rng = simulator::stream_rng(21, 0);
        for trial in 0..6 {
            let bins = rng.random_range(1..10_000usize);
            let raw: Vec<f64> = (0..bins).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let h = Histogram {
                bin_width: 0.01 + rng.random::<f64>(),
                l_min: rng.random_range(-500..500),
                l_max: 0,
                mass: raw.iter().map(|r| r / total).collect(),
            };
            let h = Histogram {
                l_max: h.l_min + bins as i64 - 1,
                ..h
            };
            // Odd trials hit the exact zero-padded FFT path.
            let u_step = if trial % 2 == 1 {
                2.0 * PI / (h.bin_width * (bins + 37) as f64)
            } else {
                0.731 / h.bin_width / 97.0
            };
            let g = ecf_from_histogram(&h, u_step, 400).unwrap();
            for _ in 0..25 {
                let i = rng.random_range(0..g.len());
                let (p, d) = naive_binned(&h, g.u(i));
                assert!((g.phi[i] - p).norm() < 1e-10, "trial {trial}");
                let scale = h.centers().fold(1.0f64, |a, c| a.max(c.abs()));
                assert!((g.phi_prime[i] - d).norm() < 1e-10 * scale, "trial {trial}");
            }
        }
    }

    #[test]
    fn grid_invariants_and_resource_cap() {
        let p = ModelParams::new(100.0, 80.0).unwrap();
        let s = simulate_series(&p, &MarkDistribution::reference_mixture(), 20_000, 64, 5).unwrap();
        let h = build_histogram(&s, default_bin_width(&s.values)).unwrap();
        let g = ecf_from_histogram(&h, 0.01, 200).unwrap();
        assert!((g.phi[200] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for j in 1..=200 {
            assert!((g.phi[200 - j] - g.phi[200 + j].conj()).norm() < 1e-12);
            assert!((g.phi_prime[200 - j] + g.phi_prime[200 + j].conj()).norm() < 1e-10);
        }
        assert!(g.phi.iter().all(|z| z.norm() <= 1.0 + 1e-12));

        let huge = ecf_from_histogram(&h, 1e-3, 1 << 28);
        assert!(matches!(huge, Err(Error::Resource(_))));
    }

    #[test]
    fn direct_grid_matches_pointwise() {
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let s = simulate_series(
            &p,
            &MarkDistribution::exponential(1.0).unwrap(),
            3000,
            64,
            2,
        )
        .unwrap();
        let g = ecf_direct_grid(&s.values, 0.05, 150).unwrap();
        for i in (0..g.len()).step_by(17) {
            let (a, b) = ecf_direct(&s, g.u(i));
            assert!((g.phi[i] - a).norm() < 1e-12);
            assert!((g.phi_prime[i] - b).norm() < 1e-11);
        }
    }

    #[test]
    fn binned_ecf_converges_as_bins_shrink() {
        // The rounding error is a sum of near-uniform offsets, so the gap is
        // linear in the bin width up to sampling noise in each ratio.
        let p = ModelParams::new(100.0, 80.0).unwrap();
        let s = simulate_series(&p, &MarkDistribution::reference_mixture(), 5_000, 64, 9).unwrap();
        let direct = ecf_direct_grid(&s.values, 0.02, 100).unwrap();
        let gaps: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&bw| {
                let h = build_histogram(&s, bw).unwrap();
                let g = ecf_from_histogram(&h, 0.02, 100).unwrap();
                g.phi
                    .iter()
                    .zip(&direct.phi)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] <= 0.6 * w[0], "{gaps:?}");
        }
        assert!(gaps[3] <= 0.15 * gaps[0], "{gaps:?}");
    }

    #[test]
    fn deviation_vanishes_for_degenerate_process() {
        let p = ModelParams::new(0.0, 1.0).unwrap();
        let m = MarkDistribution::point_mass(0.0).unwrap();
        let setup = DeviationSetup {
            u_max: 5.0,
            grid_half_count: 50,
            replicates: 3,
            base_seed: 1,
        };
        let rows = ecf_deviation(&p, &m, &setup, &[10, 100]).unwrap();
        for r in rows {
            assert_eq!(r.mean_sup_deviation, 0.0);
            assert!(r.per_replicate.iter().all(|d| *d == 0.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn binned_ecf_error_bounds_hold(
            values in proptest::collection::vec(-20.0f64..60.0, 1..400),
            bw in 0.001f64..3.0,
            u_step in 0.001f64..0.5,
        ) {
            let h = build_histogram_values(&values, bw).unwrap();
            let g = ecf_from_histogram(&h, u_step, 64).unwrap();
            let direct = ecf_direct_grid(&values, u_step, 64).unwrap();
            for i in 0..g.len() {
                let u = g.u(i);
                prop_assert!((g.phi[i] - direct.phi[i]).norm() <= h.value_bound(u) + 1e-9);
                prop_assert!((g.phi_prime[i] - direct.phi_prime[i]).norm() <= h.derivative_bound(u) + 1e-8);
            }
        }
    }
}
