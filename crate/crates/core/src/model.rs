//! Model parameters, mark laws and the analytic characteristic functions
//! used as oracles throughout the crate.
//!
//! The shot noise is `X_t = sum_k Y_k exp(-alpha (t - T_k))` over Poisson
//! arrival times `T_k <= t` with i.i.d. marks `Y_k`. Everything here works in
//! sampling-interval units: `lambda_norm = lambda * delta` and
//! `alpha_norm = alpha * delta`. The marginal law of `X` depends on the pair
//! only through `ratio = lambda / alpha`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Default relative tolerance of [`true_shot_cf`].
pub const DEFAULT_CF_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda_norm: f64,
    pub alpha_norm: f64,
    pub ratio: f64,
}

impl ModelParams {
    /// Builds parameters already expressed per sampling interval.
    pub fn new(lambda_norm: f64, alpha_norm: f64) -> Result<Self> {
        if !lambda_norm.is_finite() || lambda_norm < 0.0 {
            return Err(Error::param(format!(
                "lambda_norm must be finite and >= 0, got {lambda_norm}"
            )));
        }
        if !alpha_norm.is_finite() || alpha_norm <= 0.0 {
            return Err(Error::param(format!(
                "alpha_norm must be finite and > 0, got {alpha_norm}"
            )));
        }
        Ok(Self {
            lambda_norm,
            alpha_norm,
            ratio: lambda_norm / alpha_norm,
        })
    }

    /// Per-step autoregression coefficient `exp(-alpha_norm)`.
    pub fn decay(&self) -> f64 {
        (-self.alpha_norm).exp()
    }

    /// Burn-in long enough to contract the start value by at least `e^-40`.
    pub fn default_burn_in(&self) -> usize {
        ((40.0 / self.alpha_norm).ceil() as usize).max(64)
    }
}

/// Converts physical rates to per-sampling-interval rates.
pub fn normalize(lambda_phys: f64, alpha_phys: f64, delta: f64) -> Result<ModelParams> {
    if !lambda_phys.is_finite() || lambda_phys < 0.0 {
        return Err(Error::param(format!(
            "lambda must be finite and >= 0, got {lambda_phys}"
        )));
    }
    if !alpha_phys.is_finite() || alpha_phys <= 0.0 {
        return Err(Error::param(format!(
            "alpha must be finite and > 0, got {alpha_phys}"
        )));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::param(format!(
            "delta must be finite and > 0, got {delta}"
        )));
    }
    let params = ModelParams {
        lambda_norm: lambda_phys * delta,
        alpha_norm: alpha_phys * delta,
        ratio: lambda_phys / alpha_phys,
    };
    if !params.lambda_norm.is_finite()
        || !(params.alpha_norm > 0.0)
        || !params.alpha_norm.is_finite()
    {
        return Err(Error::param("normalized rates are not finite and positive"));
    }
    Ok(params)
}

/// Law of the marks (photon energies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    rename_all = "snake_case",
    deny_unknown_fields,
    try_from = "RawMarks"
)]
pub enum MarkDistribution {
    GaussianMixture {
        weights: Vec<f64>,
        means: Vec<f64>,
        sds: Vec<f64>,
    },
    Exponential {
        rate: f64,
    },
    PointMass {
        value: f64,
    },
}

// Mirror of `MarkDistribution` used only to validate during deserialization.
#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawMarks {
    GaussianMixture {
        weights: Vec<f64>,
        means: Vec<f64>,
        sds: Vec<f64>,
    },
    Exponential {
        rate: f64,
    },
    PointMass {
        value: f64,
    },
}

impl TryFrom<RawMarks> for MarkDistribution {
    type Error = Error;

    fn try_from(raw: RawMarks) -> Result<Self> {
        match raw {
            RawMarks::GaussianMixture {
                weights,
                means,
                sds,
            } => MarkDistribution::gaussian_mixture(weights, means, sds),
            RawMarks::Exponential { rate } => MarkDistribution::exponential(rate),
            RawMarks::PointMass { value } => MarkDistribution::point_mass(value),
        }
    }
}

impl MarkDistribution {
    pub fn gaussian_mixture(weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != sds.len() {
            return Err(Error::param(
                "mixture weights, means and sds must be non-empty and of equal length",
            ));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::param(
                "mixture weights must be finite and nonnegative",
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::param("mixture means must be finite"));
        }
        if sds.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::param(
                "mixture standard deviations must be finite and > 0",
            ));
        }
        Ok(MarkDistribution::GaussianMixture {
            weights,
            means,
            sds,
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::param(format!(
                "exponential rate must be finite and > 0, got {rate}"
            )));
        }
        Ok(MarkDistribution::Exponential { rate })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::param("point mass location must be finite"));
        }
        Ok(MarkDistribution::PointMass { value })
    }

    /// The three-component energy mixture used in the reference experiment.
    pub fn reference_mixture() -> Self {
        MarkDistribution::GaussianMixture {
            weights: vec![0.3, 0.5, 0.2],
            means: vec![4.0, 12.0, 22.0],
            sds: vec![1.0, 1.0, 0.5],
        }
    }

    /// Characteristic function `E[exp(iuY)]`.
    pub fn cf(&self, u: f64) -> Complex64 {
        match self {
            MarkDistribution::GaussianMixture {
                weights,
                means,
                sds,
            } => weights
                .iter()
                .zip(means)
                .zip(sds)
                .map(|((w, m), s)| *w * Complex64::new(-0.5 * s * s * u * u, u * m).exp())
                .sum(),
            MarkDistribution::Exponential { rate } => {
                Complex64::new(*rate, 0.0) / Complex64::new(*rate, -u)
            }
            MarkDistribution::PointMass { value } => Complex64::new(0.0, u * value).exp(),
        }
    }

    /// Density at `x`; `None` for the point mass, which has no density.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        match self {
            MarkDistribution::GaussianMixture {
                weights,
                means,
                sds,
            } => Some(
                weights
                    .iter()
                    .zip(means)
                    .zip(sds)
                    .map(|((w, m), s)| {
                        let z = (x - m) / s;
                        w * (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt())
                    })
                    .sum(),
            ),
            MarkDistribution::Exponential { rate } => Some(if x < 0.0 {
                0.0
            } else {
                rate * (-rate * x).exp()
            }),
            MarkDistribution::PointMass { .. } => None,
        }
    }

    /// Raw moment `E[Y^k]` for `k` in `1..=4`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        assert!(
            (1..=4).contains(&k),
            "raw moments are provided up to order 4"
        );
        match self {
            MarkDistribution::GaussianMixture {
                weights,
                means,
                sds,
            } => weights
                .iter()
                .zip(means)
                .zip(sds)
                .map(|((w, m), s)| {
                    let (m2, s2) = (m * m, s * s);
                    w * match k {
                        1 => *m,
                        2 => m2 + s2,
                        3 => m * m2 + 3.0 * m * s2,
                        _ => m2 * m2 + 6.0 * m2 * s2 + 3.0 * s2 * s2,
                    }
                })
                .sum(),
            MarkDistribution::Exponential { rate } => {
                let fact = (1..=k).product::<u32>() as f64;
                fact / rate.powi(k as i32)
            }
            MarkDistribution::PointMass { value } => value.powi(k as i32),
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    /// Largest frequency scale of `cf`; sets the panel width of quadratures.
    fn frequency_scale(&self) -> f64 {
        match self {
            MarkDistribution::GaussianMixture { means, sds, .. } => means
                .iter()
                .zip(sds)
                .map(|(m, s)| m.abs() + 4.0 * s)
                .fold(0.0, f64::max),
            MarkDistribution::Exponential { rate } => 1.0 / rate,
            MarkDistribution::PointMass { value } => value.abs(),
        }
    }

    /// Draws one mark. Consumes a fixed number of uniforms per variant:
    /// three for mixtures, one for the exponential, none for the point mass.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            MarkDistribution::GaussianMixture {
                weights,
                means,
                sds,
            } => {
                let pick: f64 = rng.random();
                let mut acc = 0.0;
                let mut idx = weights.len() - 1;
                for (j, w) in weights.iter().enumerate() {
                    acc += w;
                    if pick < acc {
                        idx = j;
                        break;
                    }
                }
                // Box-Muller, cosine branch only.
                let u1: f64 = 1.0 - rng.random::<f64>();
                let u2: f64 = rng.random();
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
                means[idx] + sds[idx] * z
            }
            MarkDistribution::Exponential { rate } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                -u.ln() / rate
            }
            MarkDistribution::PointMass { value } => *value,
        }
    }

    /// `(phi_Y(z) - 1) / z`, continuous at zero.
    fn cf_difference_quotient(&self, z: f64, small: f64) -> Complex64 {
        if z.abs() < small {
            // Taylor expansion through z^2; remainder is O(E[Y^4] z^3).
            let m1 = self.raw_moment(1);
            let m2 = self.raw_moment(2);
            let m3 = self.raw_moment(3);
            Complex64::new(-0.5 * m2 * z, m1 - m3 * z * z / 6.0)
        } else {
            (self.cf(z) - 1.0) / z
        }
    }

    fn taylor_radius(&self) -> f64 {
        let m4 = self.raw_moment(4).abs().powf(0.25);
        if m4 > 0.0 {
            1e-3 / m4
        } else {
            f64::INFINITY
        }
    }
}

/// Characteristic function of the marks.
pub fn mark_cf(marks: &MarkDistribution, u: f64) -> Complex64 {
    marks.cf(u)
}

/// Smoothness class constants `(s, K, L, m)`; supplied by the user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothnessConfig {
    pub s: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub m: f64,
}

impl SmoothnessConfig {
    pub fn new(s: f64, k: f64, l: f64, m: f64) -> Result<Self> {
        if !(s > 0.5) || !s.is_finite() {
            return Err(Error::param(format!(
                "smoothness s must exceed 1/2, got {s}"
            )));
        }
        for (name, v) in [("K", k), ("L", l), ("m", m)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self { s, k, l, m })
    }

    /// `C_{K,L,m,ratio} = exp(-ratio (L + K^{1/(4+m)}))`.
    pub fn cf_constant(&self, ratio: f64) -> f64 {
        (-ratio * (self.l + self.k.powf(1.0 / (4.0 + self.m)))).exp()
    }
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return Err(Error::param(format!(
            "rel_tol must lie in (0, 1e-2], got {rel_tol}"
        )));
    }
    Ok(())
}

/// Integral of `(phi_Y(z) - 1)/z` over `[a, b]`, adaptively refined.
fn log_cf_segment(
    marks: &MarkDistribution,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> std::result::Result<Complex64, Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let small = marks.taylor_radius();
    let f = |z: f64| marks.cf_difference_quotient(z, small);
    let panels =
        (((b - a).abs() * marks.frequency_scale() / 2.0).ceil() as usize).clamp(1, 1 << 20);
    let coarse = quad::composite(f, a, b, panels.max(4));
    let scale = coarse
        .norm()
        .max(quad::composite(|z| Complex64::new(f(z).norm(), 0.0), a, b, panels.max(4)).re * 1e-3);
    quad::integrate(f, a, b, panels, rel_tol * scale)
}

/// Marginal characteristic function of the stationary shot noise,
/// `exp(ratio * int_0^u (phi_Y(z) - 1)/z dz)`, by adaptive quadrature.
pub fn true_shot_cf(
    params: &ModelParams,
    marks: &MarkDistribution,
    u: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    check_rel_tol(rel_tol)?;
    if !u.is_finite() {
        return Err(Error::param("frequency must be finite"));
    }
    if u == 0.0 || params.ratio == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    match log_cf_segment(marks, 0.0, u, rel_tol) {
        Ok(log) => Ok((params.ratio * log).exp()),
        Err(partial) => Err(Error::NumericalFailure {
            message: format!(
                "quadrature of the log-characteristic function did not converge at u = {u}"
            ),
            partial: (params.ratio * partial).exp(),
        }),
    }
}

/// [`true_shot_cf`] on many frequencies, integrating cumulatively between
/// consecutive points on each side of the origin. `rel_tol` applies to each
/// increment.
pub fn true_shot_cf_many(
    params: &ModelParams,
    marks: &MarkDistribution,
    us: &[f64],
    rel_tol: f64,
) -> Result<Vec<Complex64>> {
    check_rel_tol(rel_tol)?;
    if us.iter().any(|u| !u.is_finite()) {
        return Err(Error::param("frequencies must be finite"));
    }
    let mut out = vec![Complex64::new(1.0, 0.0); us.len()];
    if params.ratio == 0.0 {
        return Ok(out);
    }
    for sign in [1.0f64, -1.0] {
        let mut idx: Vec<usize> = (0..us.len()).filter(|&i| us[i] * sign > 0.0).collect();
        idx.sort_by(|&i, &j| (us[i] * sign).total_cmp(&(us[j] * sign)));
        let mut at = 0.0;
        let mut log = Complex64::new(0.0, 0.0);
        for i in idx {
            let seg = log_cf_segment(marks, at, us[i], rel_tol).map_err(|partial| {
                Error::NumericalFailure {
                    message: format!(
                        "quadrature of the log-characteristic function did not converge at u = {}",
                        us[i]
                    ),
                    partial: (params.ratio * (log + partial)).exp(),
                }
            })?;
            log += seg;
            at = us[i];
            out[i] = (params.ratio * log).exp();
        }
    }
    Ok(out)
}

/// Derivative of the marginal characteristic function, from
/// `phi_X'(u) = phi_X(u) * ratio * (phi_Y(u) - 1) / u`.
pub fn true_shot_cf_derivative(
    params: &ModelParams,
    marks: &MarkDistribution,
    u: f64,
    phi_x: Complex64,
) -> Complex64 {
    phi_x * params.ratio * marks.cf_difference_quotient(u, marks.taylor_radius())
}

/// Lower bound `C (1+|u|)^{-ratio}` on the modulus of the marginal
/// characteristic function over the smoothness class.
pub fn cf_lower_bound(config: &SmoothnessConfig, params: &ModelParams, u: f64) -> f64 {
    config.cf_constant(params.ratio) * (1.0 + u.abs()).powf(-params.ratio)
}

/// Brute-force numerical checks that a mark law satisfies the moment and
/// Sobolev constraints of a smoothness class.
pub mod admissibility {
    use super::*;

    #[derive(Debug, Clone, Copy, PartialEq, Serialize)]
    pub struct Report {
        /// `E|Y|^{4+m}`.
        pub abs_moment: f64,
        /// `E|Y|`.
        pub mean_abs: f64,
        /// `(int (1+u^2)^s |phi_Y(u)|^2 du)^{1/2}`, infinite when divergent.
        pub sobolev_norm: f64,
        /// `(int_1^inf |Re phi_Y(z)|^2 dz)^{1/2}`, the only Sobolev-type
        /// quantity the characteristic-function lower bound depends on.
        pub re_cf_tail_norm: f64,
    }

    impl Report {
        /// Full class membership.
        pub fn in_class(&self, config: &SmoothnessConfig) -> bool {
            self.abs_moment <= config.k && self.sobolev_norm <= config.l
        }

        /// The weaker pair of conditions under which
        /// `|phi_X(u)| >= cf_lower_bound(u)` holds.
        pub fn supports_cf_lower_bound(&self, config: &SmoothnessConfig) -> bool {
            self.mean_abs <= config.k.powf(1.0 / (4.0 + config.m))
                && self.re_cf_tail_norm <= config.l
        }
    }

    /// Numerical `E|Y|^q`.
    pub fn abs_moment(marks: &MarkDistribution, q: f64) -> f64 {
        match marks {
            MarkDistribution::GaussianMixture { means, sds, .. } => {
                let lo = means
                    .iter()
                    .zip(sds)
                    .map(|(m, s)| m - 14.0 * s)
                    .fold(f64::INFINITY, f64::min);
                let hi = means
                    .iter()
                    .zip(sds)
                    .map(|(m, s)| m + 14.0 * s)
                    .fold(f64::NEG_INFINITY, f64::max);
                let f = |y: f64| y.abs().powf(q) * marks.pdf(y).unwrap_or(0.0);
                let panels =
                    (((hi - lo) / sds.iter().cloned().fold(f64::INFINITY, f64::min)).ceil()
                        as usize)
                        .max(8);
                let scale = quad::composite(|y| Complex64::new(f(y), 0.0), lo, hi, panels).re;
                let mut knots = vec![lo, hi];
                if lo < 0.0 && hi > 0.0 {
                    knots.insert(1, 0.0);
                }
                knots
                    .windows(2)
                    .map(|w| {
                        quad::integrate_real(f, w[0], w[1], panels, 1e-10 * scale.max(1e-300))
                            .unwrap_or_else(|p| p)
                    })
                    .sum()
            }
            MarkDistribution::Exponential { rate } => {
                let hi = (q + 60.0) / rate;
                let f = |y: f64| y.powf(q) * rate * (-rate * y).exp();
                let scale = quad::composite(|y| Complex64::new(f(y), 0.0), 0.0, hi, 64).re;
                quad::integrate_real(f, 0.0, hi, 64, 1e-10 * scale.max(1e-300))
                    .unwrap_or_else(|p| p)
            }
            MarkDistribution::PointMass { value } => value.abs().powf(q),
        }
    }

    /// Numerical `(int (1+u^2)^s |phi_Y(u)|^2 du)^{1/2}` for `s > 1/2`.
    pub fn sobolev_norm(marks: &MarkDistribution, s: f64) -> f64 {
        match marks {
            MarkDistribution::GaussianMixture { sds, .. } => {
                let smin = sds.iter().cloned().fold(f64::INFINITY, f64::min);
                // |phi_Y|^2 <= exp(-smin^2 u^2); go far enough that the weight
                // (1+u^2)^s cannot revive the tail.
                let mut hi = 10.0 / smin;
                while (-(smin * hi).powi(2)).exp() * (1.0 + hi * hi).powf(s) > 1e-20 {
                    hi *= 1.25;
                }
                let f = |u: f64| (1.0 + u * u).powf(s) * marks.cf(u).norm_sqr();
                let panels = ((hi * marks.frequency_scale()).ceil() as usize).max(16);
                let scale = quad::composite(|u| Complex64::new(f(u), 0.0), 0.0, hi, panels).re;
                let half =
                    quad::integrate_real(f, 0.0, hi, panels, 1e-10 * scale).unwrap_or_else(|p| p);
                (2.0 * half).sqrt()
            }
            // |phi_Y(u)|^2 ~ u^{-2} for the exponential and == 1 for the point
            // mass, so the weighted integral diverges for every s > 1/2.
            MarkDistribution::Exponential { .. } | MarkDistribution::PointMass { .. } => {
                f64::INFINITY
            }
        }
    }

    /// Numerical `(int_1^inf |Re phi_Y(z)|^2 dz)^{1/2}` via `z = 1/t`.
    pub fn re_cf_tail_norm(marks: &MarkDistribution) -> f64 {
        if let MarkDistribution::PointMass { .. } = marks {
            return f64::INFINITY;
        }
        let f = |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                let re = marks.cf(1.0 / t).re;
                re * re / (t * t)
            }
        };
        // Oscillation of cos(mu / t) near t = 0 needs fine panels there.
        let panels = ((marks.frequency_scale() * 40.0).ceil() as usize).clamp(64, 1 << 16);
        let scale = quad::composite(|t| Complex64::new(f(t), 0.0), 0.0, 1.0, panels)
            .re
            .abs()
            .max(1e-12);
        quad::integrate_real(f, 0.0, 1.0, panels, 1e-10 * scale)
            .unwrap_or_else(|p| p)
            .sqrt()
    }

    pub fn report(marks: &MarkDistribution, config: &SmoothnessConfig) -> Report {
        Report {
            abs_moment: abs_moment(marks, 4.0 + config.m),
            mean_abs: abs_moment(marks, 1.0),
            sobolev_norm: sobolev_norm(marks, config.s),
            re_cf_tail_norm: re_cf_tail_norm(marks),
        }
    }
}

/// On-disk model description:
/// `{"lambda": .., "alpha": .., "delta": .., "marks": {"type": .., ..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub lambda: f64,
    pub alpha: f64,
    pub delta: f64,
    pub marks: MarkDistribution,
}

impl ModelSpec {
    pub fn params(&self) -> Result<ModelParams> {
        normalize(self.lambda, self.alpha, self.delta)
    }

    /// Physical configuration of the reference detector experiment.
    pub fn reference() -> Self {
        ModelSpec {
            lambda: 1e9,
            alpha: 8e8,
            delta: 1e-7,
            marks: MarkDistribution::reference_mixture(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)?;
        spec.params()?;
        Ok(spec)
    }
}
