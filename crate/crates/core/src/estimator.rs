//! Nonparametric estimator of the mark density.
//!
//! The marginal characteristic function of the shot noise satisfies
//! `phi_Y(u) = 1 + u phi_X'(u) / (ratio phi_X(u))`, so the mark density is
//! recovered by plugging in the empirical characteristic function, discarding
//! frequencies where `|phi_n|` is below a threshold `kappa`, and inverting the
//! Fourier transform over `[-cutoff, cutoff]`:
//!
//! ```text
//! theta_n(x) = max(0, 1/(2 pi) int_{-cutoff}^{cutoff} e^{-ixu}
//!                     (1 + u phi_n'(u) / (ratio phi_n(u)) 1{|phi_n(u)| > kappa}) du)
//! ```

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::czt;
use crate::ecf::{self, EcfGrid};
use crate::error::{Error, Result};
use crate::simulator::SampleSeries;

/// Number of frequency steps on each side of the origin by default.
pub const DEFAULT_U_POINTS: usize = 1024;

/// Number of points of the default energy grid.
pub const DEFAULT_X_POINTS: usize = 2048;

/// Largest allowed imaginary residual of the inversion, relative to the sup
/// of its real part.
pub const MAX_IMAG_RESIDUAL: f64 = 1e-6;

/// `h_n = n^{-1/(2s + 1 + 2 ratio)}`.
pub fn theorem_bandwidth(n: usize, s: f64, ratio: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::param(format!(
            "bandwidth formula needs n >= 3, got {n}"
        )));
    }
    if !(s > 0.5) || !s.is_finite() {
        return Err(Error::param(format!(
            "smoothness s must exceed 1/2, got {s}"
        )));
    }
    if !(ratio >= 0.0) || !ratio.is_finite() {
        return Err(Error::param(format!(
            "ratio must be finite and >= 0, got {ratio}"
        )));
    }
    Ok((n as f64).powf(-1.0 / (2.0 * s + 1.0 + 2.0 * ratio)))
}

/// `kappa = C (1 + cutoff)^{-2 ratio}`.
pub fn theorem_threshold(cutoff: f64, c: f64, ratio: f64) -> f64 {
    threshold_with_exponent(cutoff, c, ratio, KappaExponent::Double)
}

/// `kappa = C (1 + cutoff)^{-e ratio}` with `e` in {1, 2}.
pub fn threshold_with_exponent(cutoff: f64, c: f64, ratio: f64, exponent: KappaExponent) -> f64 {
    c * (1.0 + cutoff).powf(-exponent.multiplier() * ratio)
}

/// Data-driven threshold constant `exp(-mean) / 2`.
pub fn adaptive_c(sample: &SampleSeries) -> f64 {
    (-sample.mean()).exp() / 2.0
}

/// Multiplier of `ratio` in the threshold exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum KappaExponent {
    /// `(1 + cutoff)^{-ratio}`, the decay rate of the lower bound on `|phi_X|`.
    Single,
    /// `(1 + cutoff)^{-2 ratio}`, the rate used by the convergence theorem.
    Double,
}

impl KappaExponent {
    pub fn multiplier(self) -> f64 {
        match self {
            KappaExponent::Single => 1.0,
            KappaExponent::Double => 2.0,
        }
    }
}

impl TryFrom<u8> for KappaExponent {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(KappaExponent::Single),
            2 => Ok(KappaExponent::Double),
            _ => Err(format!("kappa exponent must be 1 or 2, got {v}")),
        }
    }
}

impl From<KappaExponent> for u8 {
    fn from(e: KappaExponent) -> u8 {
        match e {
            KappaExponent::Single => 1,
            KappaExponent::Double => 2,
        }
    }
}

/// Integration limit of the inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffRule {
    Fixed(f64),
    /// `scale / h_n` with `h_n` from [`theorem_bandwidth`].
    Theorem {
        s: f64,
        scale: f64,
    },
}

/// Threshold constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdConstant {
    Fixed(f64),
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ThresholdRule {
    /// `kappa = C (1 + cutoff)^{-e ratio}`.
    Theorem {
        constant: ThresholdConstant,
        exponent: KappaExponent,
    },
    Fixed(f64),
}

/// Regular energy grid `start + k step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl XGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        let g = XGrid { start, step, count };
        g.validate()?;
        Ok(g)
    }

    /// `count` points from `start` to `end` inclusive.
    pub fn spanning(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::param("x grid needs at least 2 points"));
        }
        XGrid::new(start, (end - start) / (count - 1) as f64, count)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !(self.step > 0.0) || !self.step.is_finite() || self.count < 2
        {
            return Err(Error::param(format!(
                "x grid needs finite start, step > 0 and count >= 2, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// `lambda / alpha`, assumed known.
    pub ratio: f64,
    pub cutoff: CutoffRule,
    pub threshold: ThresholdRule,
    /// Histogram bin width; `None` gives about 4096 bins over the sample range.
    pub bin_width: Option<f64>,
    /// Frequency steps per side; `u_step = cutoff / u_points`.
    pub u_points: usize,
    /// Energy grid; `None` uses `[0, 1.2 q_0.999 / ratio]` with 2048 points.
    pub x_grid: Option<XGrid>,
    pub renormalize: bool,
}

impl EstimatorConfig {
    /// Theorem tuning with adaptive threshold constant and exponent `2 ratio`.
    pub fn theorem(ratio: f64, s: f64) -> Self {
        EstimatorConfig {
            ratio,
            cutoff: CutoffRule::Theorem { s, scale: 1.0 },
            threshold: ThresholdRule::Theorem {
                constant: ThresholdConstant::Adaptive,
                exponent: KappaExponent::Double,
            },
            bin_width: None,
            u_points: DEFAULT_U_POINTS,
            x_grid: None,
            renormalize: false,
        }
    }

    pub fn with_cutoff(mut self, cutoff: CutoffRule) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_threshold(mut self, threshold: ThresholdRule) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_x_grid(mut self, grid: XGrid) -> Self {
        self.x_grid = Some(grid);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0) || !self.ratio.is_finite() {
            return Err(Error::param(format!(
                "ratio must be finite and > 0, got {}",
                self.ratio
            )));
        }
        match self.cutoff {
            CutoffRule::Fixed(c) if !(c > 0.0) || !c.is_finite() => {
                return Err(Error::param(format!(
                    "cutoff must be finite and > 0, got {c}"
                )))
            }
            CutoffRule::Theorem { s, scale }
                if !(s > 0.5) || !(scale > 0.0) || !scale.is_finite() =>
            {
                return Err(Error::param(format!(
                    "theorem cutoff needs s > 1/2 and scale > 0, got s={s} scale={scale}"
                )))
            }
            _ => {}
        }
        match self.threshold {
            ThresholdRule::Fixed(k) if !(k > 0.0) || !k.is_finite() => {
                return Err(Error::param(format!(
                    "kappa must be finite and > 0, got {k}"
                )))
            }
            ThresholdRule::Theorem {
                constant: ThresholdConstant::Fixed(c),
                ..
            } if !(c > 0.0) || !c.is_finite() => {
                return Err(Error::param(format!("C must be finite and > 0, got {c}")))
            }
            _ => {}
        }
        if let Some(bw) = self.bin_width {
            if !(bw > 0.0) || !bw.is_finite() {
                return Err(Error::param(format!(
                    "bin_width must be finite and > 0, got {bw}"
                )));
            }
        }
        if self.u_points < 64 {
            return Err(Error::param(format!(
                "u_points must be at least 64, got {}",
                self.u_points
            )));
        }
        if let Some(g) = &self.x_grid {
            g.validate()?;
        }
        Ok(())
    }

    /// Integration limit for a sample of size `n`.
    pub fn resolve_cutoff(&self, n: usize) -> Result<f64> {
        match self.cutoff {
            CutoffRule::Fixed(c) => Ok(c),
            CutoffRule::Theorem { s, scale } => Ok(scale / theorem_bandwidth(n, s, self.ratio)?),
        }
    }

    /// Threshold and the constant it was derived from (if any).
    pub fn resolve_kappa(&self, sample: &SampleSeries, cutoff: f64) -> (f64, Option<f64>) {
        match self.threshold {
            ThresholdRule::Fixed(k) => (k, None),
            ThresholdRule::Theorem { constant, exponent } => {
                let c = match constant {
                    ThresholdConstant::Fixed(c) => c,
                    ThresholdConstant::Adaptive => adaptive_c(sample),
                };
                (
                    threshold_with_exponent(cutoff, c, self.ratio, exponent),
                    Some(c),
                )
            }
        }
    }
}

/// Estimated mark characteristic function on a symmetric frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkCfEstimate {
    pub u_step: f64,
    pub half_count: usize,
    pub values: Vec<Complex64>,
    pub fraction_thresholded: f64,
    pub min_abs_ecf: f64,
}

impl MarkCfEstimate {
    /// Wraps known characteristic-function values laid out like an
    /// [`EcfGrid`], e.g. an exact `phi_Y` for testing the inversion alone.
    pub fn from_values(u_step: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len().is_multiple_of(2) || values.len() < 3 {
            return Err(Error::param(
                "frequency grid must have an odd number (>= 3) of points",
            ));
        }
        if !(u_step > 0.0) {
            return Err(Error::param("u_step must be > 0"));
        }
        Ok(Self {
            u_step,
            half_count: values.len() / 2,
            values,
            fraction_thresholded: 0.0,
            min_abs_ecf: f64::NAN,
        })
    }

    pub fn u(&self, idx: usize) -> f64 {
        (idx as f64 - self.half_count as f64) * self.u_step
    }
}

/// `phi_Y(u) = 1 + u phi'(u) / (ratio phi(u))` where `|phi(u)| > kappa`,
/// exactly 1 elsewhere. Each grid point is handled on its own; negative
/// frequencies are not derived from positive ones.
pub fn mark_cf_estimate(grid: &EcfGrid, ratio: f64, kappa: f64) -> Result<MarkCfEstimate> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::param(format!(
            "ratio must be finite and > 0, got {ratio}"
        )));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param(format!(
            "kappa must be finite and > 0, got {kappa}"
        )));
    }
    let mut thresholded = 0usize;
    let mut min_abs = f64::INFINITY;
    let values = grid
        .phi
        .iter()
        .zip(&grid.phi_prime)
        .enumerate()
        .map(|(i, (p, d))| {
            let modulus = p.norm();
            min_abs = min_abs.min(modulus);
            if modulus > kappa {
                let u = grid.u(i);
                Complex64::new(1.0, 0.0) + u * d / (ratio * p)
            } else {
                thresholded += 1;
                Complex64::new(1.0, 0.0)
            }
        })
        .collect();
    Ok(MarkCfEstimate {
        u_step: grid.u_step,
        half_count: grid.half_count,
        values,
        fraction_thresholded: thresholded as f64 / grid.len() as f64,
        min_abs_ecf: min_abs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub fraction_thresholded: f64,
    pub min_abs_ecf: f64,
    /// `sup |Im| / sup |Re|` of the unclamped inversion integral.
    pub imag_residual: f64,
    /// Set when every frequency was thresholded (estimate is a pure
    /// Dirichlet kernel) or renormalization was impossible.
    pub warning: Option<String>,
}

/// Settings actually used for one estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSettings {
    pub n: usize,
    pub cutoff: f64,
    pub kappa: f64,
    pub threshold_constant: Option<f64>,
    pub bin_width: f64,
    pub u_step: f64,
    pub u_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub x_grid: XGrid,
    pub x: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub cutoff: f64,
    pub diagnostics: Diagnostics,
    pub config: Option<EstimatorConfig>,
    pub settings: Option<ResolvedSettings>,
}

impl DensityEstimate {
    /// CSV `x,theta_hat`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,theta_hat")?;
        for (x, t) in self.x.iter().zip(&self.theta_hat) {
            writeln!(out, "{},{}", crate::fmt_f64(*x), crate::fmt_f64(*t))?;
        }
        Ok(())
    }

    pub fn diagnostics_json(&self) -> serde_json::Value {
        serde_json::json!({
            "fraction_thresholded": self.diagnostics.fraction_thresholded,
            "min_abs_ecf": self.diagnostics.min_abs_ecf,
            "imag_residual": self.diagnostics.imag_residual,
            "warning": self.diagnostics.warning,
            "settings": self.settings,
            "config": self.config,
        })
    }

    /// Left Riemann sum of the estimate over the grid.
    pub fn riemann_integral(&self) -> f64 {
        ecf::neumaier_sum(self.theta_hat.iter().copied()) * self.x_grid.step
    }

    /// Interior local maxima strictly above `floor`, as `(x, theta_hat)`.
    pub fn local_maxima(&self, floor: f64) -> Vec<(f64, f64)> {
        let t = &self.theta_hat;
        (1..t.len().saturating_sub(1))
            .filter(|&k| t[k] > floor && t[k] > t[k - 1] && t[k] >= t[k + 1])
            .map(|k| (self.x[k], t[k]))
            .collect()
    }
}

/// Quadrature weights for nodes `j = -m..=m` covering `[-cutoff, cutoff]`:
/// trapezoid on whole cells, with the partial last cell integrated against
/// the linear interpolant of the neighbouring nodes.
fn inversion_weights(u_step: f64, half_count: usize, cutoff: f64) -> (usize, Vec<f64>) {
    let ratio = cutoff / u_step;
    let whole = ((ratio + 1e-9).floor() as usize).min(half_count);
    let rem = (cutoff - whole as f64 * u_step).max(0.0);
    let partial = rem > 1e-12 * u_step && whole < half_count;
    let m = if partial { whole + 1 } else { whole };
    let mut w = vec![u_step; 2 * m + 1];
    let mid = m as isize;
    let mut set = |j: isize, v: f64| w[(mid + j) as usize] = v;
    if partial {
        let jw = whole as isize;
        let a = rem * (1.0 - rem / (2.0 * u_step));
        let b = rem * rem / (2.0 * u_step);
        for sgn in [-1isize, 1] {
            set(sgn * jw, 0.5 * u_step + a);
            set(sgn * (jw + 1), b);
        }
        if whole == 0 {
            set(0, 2.0 * a);
        }
    } else if m > 0 {
        set(-(m as isize), 0.5 * u_step);
        set(m as isize, 0.5 * u_step);
    }
    (m, w)
}

/// `1/(2 pi) int_{-cutoff}^{cutoff} e^{-ixu} phi_Y(u) du` on `x_grid`,
/// clamped at zero.
pub fn invert_density(
    mark_cf: &MarkCfEstimate,
    cutoff: f64,
    x_grid: &XGrid,
) -> Result<DensityEstimate> {
    x_grid.validate()?;
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::param(format!(
            "cutoff must be finite and > 0, got {cutoff}"
        )));
    }
    let u_max = mark_cf.half_count as f64 * mark_cf.u_step;
    if u_max < cutoff * (1.0 - 1e-12) {
        return Err(Error::param(format!(
            "frequency grid reaches {u_max}, short of the cutoff {cutoff}"
        )));
    }
    if mark_cf.u_step > cutoff / 64.0 * (1.0 + 1e-12) {
        return Err(Error::param(format!(
            "u_step {} is coarser than cutoff/64 = {}",
            mark_cf.u_step,
            cutoff / 64.0
        )));
    }
    let (m, weights) = inversion_weights(mark_cf.u_step, mark_cf.half_count, cutoff);
    let base = mark_cf.half_count - m;
    let du = mark_cf.u_step;
    // b_j = w_j phi_Y(u_j) exp(-i x0 u_j) for j = -m..=m.
    let b: Vec<Complex64> = weights
        .iter()
        .enumerate()
        .map(|(idx, w)| {
            let u = (idx as f64 - m as f64) * du;
            mark_cf.values[base + idx] * *w * Complex64::from_polar(1.0, -x_grid.start * u)
        })
        .collect();
    let integral = inverse_sum(&b, m, du, x_grid)?;

    let sup_re = integral.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let sup_im = integral.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let imag_residual = if sup_re > 0.0 {
        sup_im / sup_re
    } else {
        sup_im
    };
    if !(imag_residual < MAX_IMAG_RESIDUAL) {
        return Err(Error::NumericalFailure {
            message: format!(
                "inversion has imaginary residual {imag_residual:e} relative to its real part"
            ),
            partial: Complex64::new(sup_re, sup_im) / (2.0 * PI),
        });
    }
    let theta_hat: Vec<f64> = integral
        .iter()
        .map(|z| (z.re / (2.0 * PI)).max(0.0))
        .collect();
    let warning = (mark_cf.fraction_thresholded >= 1.0).then(|| {
        "every frequency was thresholded; the estimate is the Dirichlet kernel".to_string()
    });
    Ok(DensityEstimate {
        x_grid: *x_grid,
        x: x_grid.points(),
        theta_hat,
        cutoff,
        diagnostics: Diagnostics {
            fraction_thresholded: mark_cf.fraction_thresholded,
            min_abs_ecf: mark_cf.min_abs_ecf,
            imag_residual,
            warning,
        },
        config: None,
        settings: None,
    })
}

/// `S_k = sum_{j=-m}^{m} b_j exp(-i k dx u_j)` for every grid index `k`.
fn inverse_sum(b: &[Complex64], m: usize, du: f64, x_grid: &XGrid) -> Result<Vec<Complex64>> {
    let theta = -x_grid.step * du;
    if b.len() * x_grid.count <= 1 << 16 {
        return Ok((0..x_grid.count)
            .map(|k| {
                b.iter()
                    .enumerate()
                    .map(|(idx, v)| {
                        v * Complex64::from_polar(1.0, theta * k as f64 * (idx as f64 - m as f64))
                    })
                    .sum()
            })
            .collect());
    }
    // exp(-i k dx (idx - m) du) = exp(i theta k idx) exp(-i theta k m)
    let raw = czt::chirp_z(b, theta, x_grid.count)?;
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, -theta * k as f64 * m as f64))
        .collect())
}

/// Default energy grid: `[0, 1.2 q_0.999(sample) / ratio]`.
pub fn default_x_grid(values: &[f64], ratio: f64) -> Result<XGrid> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((0.999 * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1);
    let q = sorted[idx];
    let end = 1.2 * q / ratio;
    if end > 0.0 {
        XGrid::spanning(0.0, end, DEFAULT_X_POINTS)
    } else {
        XGrid::spanning(-1.0, 1.0, DEFAULT_X_POINTS)
    }
}

/// Full pipeline: histogram, binned ECF, thresholded CF ratio, inversion.
pub fn estimate_density(
    sample: &SampleSeries,
    config: &EstimatorConfig,
) -> Result<DensityEstimate> {
    config.validate()?;
    if sample.is_empty() {
        return Err(Error::input("sample must be non-empty"));
    }
    let n = sample.len();
    let cutoff = config.resolve_cutoff(n)?;
    let (kappa, threshold_constant) = config.resolve_kappa(sample, cutoff);
    let bin_width = config
        .bin_width
        .unwrap_or_else(|| ecf::default_bin_width(&sample.values));
    let u_step = cutoff / config.u_points as f64;
    let hist = ecf::build_histogram(sample, bin_width)?;
    let grid = ecf::ecf_from_histogram(&hist, u_step, config.u_points)?;
    let mark_cf = mark_cf_estimate(&grid, config.ratio, kappa)?;
    let x_grid = match config.x_grid {
        Some(g) => g,
        None => default_x_grid(&sample.values, config.ratio)?,
    };
    let mut est = invert_density(&mark_cf, cutoff, &x_grid)?;
    if config.renormalize {
        let total = est.riemann_integral();
        if total > 0.0 {
            est.theta_hat.iter_mut().for_each(|t| *t /= total);
        } else {
            est.diagnostics.warning =
                Some("estimate integrates to zero; not renormalized".to_string());
        }
    }
    est.config = Some(config.clone());
    est.settings = Some(ResolvedSettings {
        n,
        cutoff,
        kappa,
        threshold_constant,
        bin_width,
        u_step,
        u_points: config.u_points,
    });
    Ok(est)
}

/// Hill-type estimate of `lambda / alpha` from the lower tail of the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    /// Estimated ratio; `+inf` when the Hill statistic is zero.
    pub ratio: f64,
    pub hill_statistic: f64,
    pub k: usize,
}

/// Default number of order statistics, `floor(n^0.6)`.
pub fn default_hill_k(n: usize) -> usize {
    ((n as f64).powf(0.6).floor() as usize).clamp(1, n.saturating_sub(1).max(1))
}

/// The marginal cdf behaves like `x^ratio` at 0, so `Z = 1/X` has a Pareto-type
/// upper tail of index `ratio`. Returns the reciprocal of the Hill statistic
/// `1/k sum_{i=1}^{k} log(Z_(n-i+1) / Z_(n-k))`.
pub fn hill_ratio(sample: &SampleSeries, k: usize) -> Result<HillEstimate> {
    hill_ratio_values(&sample.values, k)
}

pub fn hill_ratio_values(values: &[f64], k: usize) -> Result<HillEstimate> {
    if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::input(format!(
            "Hill estimation needs strictly positive finite observations, found {bad}"
        )));
    }
    let n = values.len();
    if k == 0 || k >= n {
        return Err(Error::param(format!(
            "k must satisfy 1 <= k < n = {n}, got {k}"
        )));
    }
    // Largest Z are the smallest X: log(Z_i / Z_k) = log(X_k / X_i).
    let mut xs = values.to_vec();
    xs.select_nth_unstable_by(k, f64::total_cmp);
    let anchor = xs[k];
    let stat = ecf::neumaier_sum(xs[..k].iter().map(|x| (anchor / x).ln())) / k as f64;
    Ok(HillEstimate {
        ratio: if stat > 0.0 {
            1.0 / stat
        } else {
            f64::INFINITY
        },
        hill_statistic: stat,
        k,
    })
}
