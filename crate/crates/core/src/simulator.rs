//! Exact sampling of the regularly observed shot noise.
//!
//! With an exponential impulse response the sampled process is a first-order
//! autoregression driven by i.i.d. innovations,
//!
//! ```text
//! X_{i+1} = exp(-alpha_norm) X_i + W_{i+1},
//! W = sum_{k=1}^{N} Y_k exp(-alpha_norm U_k),  N ~ Poisson(lambda_norm),  U_k ~ U(0, 1)
//! ```
//!
//! so a series can be generated without discretising time.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MarkDistribution, ModelParams};

/// Random stream used for every simulation.
pub type SimRng = ChaCha8Rng;

/// Independent stream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson counts per sampling interval.
#[derive(Debug, Clone)]
pub struct ArrivalCounter {
    inner: Option<Poisson<f64>>,
}

impl ArrivalCounter {
    pub fn new(lambda_norm: f64) -> Result<Self> {
        if lambda_norm == 0.0 {
            return Ok(Self { inner: None });
        }
        let inner = Poisson::new(lambda_norm)
            .map_err(|e| Error::param(format!("cannot sample Poisson({lambda_norm}): {e}")))?;
        Ok(Self { inner: Some(inner) })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.inner {
            None => 0,
            Some(p) => p.sample(rng) as u64,
        }
    }
}

/// Innovation given its Poisson count: consumes `count` uniforms for the
/// arrival offsets plus the mark draws.
fn innovation_with_count<R: Rng + ?Sized>(
    params: &ModelParams,
    marks: &MarkDistribution,
    count: u64,
    rng: &mut R,
) -> f64 {
    let mut w = 0.0;
    for _ in 0..count {
        let offset: f64 = rng.random();
        let y = marks.sample(rng);
        w += y * (-params.alpha_norm * offset).exp();
    }
    w
}

/// One draw of the innovation `W`.
pub fn sample_innovation<R: Rng + ?Sized>(
    params: &ModelParams,
    marks: &MarkDistribution,
    rng: &mut R,
) -> Result<f64> {
    let counter = ArrivalCounter::new(params.lambda_norm)?;
    let n = counter.sample(rng);
    Ok(innovation_with_count(params, marks, n, rng))
}

/// A regularly sampled path together with everything needed to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSeries {
    pub values: Vec<f64>,
    pub params: ModelParams,
    pub marks: MarkDistribution,
    pub seed: u64,
    pub burn_in: usize,
    /// Stream index within `seed`; 0 for single runs.
    #[serde(default)]
    pub stream: u64,
}

impl SampleSeries {
    /// Wraps externally obtained observations. Metadata describes the
    /// assumed model; `seed` and `burn_in` are zero.
    pub fn from_observations(
        values: Vec<f64>,
        params: ModelParams,
        marks: MarkDistribution,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("sample must be non-empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::input(format!(
                "sample contains a non-finite value {bad}"
            )));
        }
        Ok(Self {
            values,
            params,
            marks,
            seed: 0,
            burn_in: 0,
            stream: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        crate::ecf::neumaier_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    /// CSV with header `index,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, crate::fmt_f64(*v))?;
        }
        Ok(())
    }

    /// Raw little-endian `f64` column.
    pub fn write_f64le<W: Write>(&self, mut out: W) -> Result<()> {
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Generation metadata as a JSON object (values omitted).
    pub fn metadata_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.values.len(),
            "params": self.params,
            "marks": self.marks,
            "seed": self.seed,
            "stream": self.stream,
            "burn_in": self.burn_in,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

/// Reads a CSV written by [`SampleSeries::write_csv`] or a plain
/// one-column list of numbers.
pub fn read_values_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty()
            || (lineno == 0
                && line
                    .chars()
                    .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E'))
        {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        let v: f64 = field.parse().map_err(|_| {
            Error::input(format!(
                "{}:{}: cannot parse '{field}'",
                path.display(),
                lineno + 1
            ))
        })?;
        values.push(v);
    }
    Ok(values)
}

/// Reads a raw little-endian `f64` file.
pub fn read_values_f64le(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::input(format!(
            "{}: length is not a multiple of 8 bytes",
            path.display()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

/// Runs the autoregression from `X_0 = 0`, discards `burn_in` steps and
/// keeps the next `n`.
pub fn simulate_series(
    params: &ModelParams,
    marks: &MarkDistribution,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<SampleSeries> {
    simulate_series_stream(params, marks, n, burn_in, seed, 0)
}

/// [`simulate_series`] on stream `stream` of `seed`; Monte-Carlo run `r`
/// uses stream `r`.
pub fn simulate_series_stream(
    params: &ModelParams,
    marks: &MarkDistribution,
    n: usize,
    burn_in: usize,
    seed: u64,
    stream: u64,
) -> Result<SampleSeries> {
    if n == 0 {
        return Err(Error::param("series length n must be at least 1"));
    }
    let mut rng = stream_rng(seed, stream);
    let counter = ArrivalCounter::new(params.lambda_norm)?;
    let decay = params.decay();
    let mut x = 0.0;
    for _ in 0..burn_in {
        let count = counter.sample(&mut rng);
        x = decay * x + innovation_with_count(params, marks, count, &mut rng);
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let count = counter.sample(&mut rng);
        x = decay * x + innovation_with_count(params, marks, count, &mut rng);
        values.push(x);
    }
    Ok(SampleSeries {
        values,
        params: *params,
        marks: marks.clone(),
        seed,
        burn_in,
        stream,
    })
}

/// Event-level realisation on `[0, horizon]` for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedEventTrace {
    pub times: Vec<f64>,
    pub marks: Vec<f64>,
    /// Level at `t = 0`.
    pub initial: f64,
    pub path_grid: Vec<f64>,
    pub path_values: Vec<f64>,
}

impl MarkedEventTrace {
    /// CSV `t,value` of the continuous path.
    pub fn write_path_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.path_grid.iter().zip(&self.path_values) {
            writeln!(out, "{},{}", crate::fmt_f64(*t), crate::fmt_f64(*v))?;
        }
        Ok(())
    }

    /// CSV `time,mark` of the marked point process.
    pub fn write_events_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "time,mark")?;
        for (t, y) in self.times.iter().zip(&self.marks) {
            writeln!(out, "{},{}", crate::fmt_f64(*t), crate::fmt_f64(*y))?;
        }
        Ok(())
    }
}

/// Simulates Poisson arrivals on `[0, horizon]` (time in sampling intervals)
/// and evaluates the superposition on a regular grid of step `grid_step`.
/// The initial level is drawn by running the autoregression for the default
/// burn-in.
pub fn simulate_trace(
    params: &ModelParams,
    marks: &MarkDistribution,
    horizon: f64,
    grid_step: f64,
    seed: u64,
) -> Result<MarkedEventTrace> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param(format!(
            "horizon must be finite and > 0, got {horizon}"
        )));
    }
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(Error::param(format!(
            "grid_step must be finite and > 0, got {grid_step}"
        )));
    }
    let points = (horizon / grid_step).floor() as usize + 1;
    if points > 50_000_000 {
        return Err(Error::Resource(format!(
            "trace grid of {points} points is too large"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let counter = ArrivalCounter::new(params.lambda_norm)?;
    let decay = params.decay();
    let mut initial = 0.0;
    for _ in 0..params.default_burn_in() {
        let count = counter.sample(&mut rng);
        initial = decay * initial + innovation_with_count(params, marks, count, &mut rng);
    }

    // Arrivals: Poisson total count, then sorted uniform times.
    let total = ArrivalCounter::new(params.lambda_norm * horizon)?.sample(&mut rng);
    let mut times: Vec<f64> = (0..total).map(|_| rng.random::<f64>() * horizon).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let event_marks: Vec<f64> = times.iter().map(|_| marks.sample(&mut rng)).collect();

    // Sweep the grid, carrying the level between grid points.
    let alpha = params.alpha_norm;
    let mut path_grid = Vec::with_capacity(points);
    let mut path_values = Vec::with_capacity(points);
    let mut level = initial;
    let mut at = 0.0;
    let mut next = 0;
    for g in 0..points {
        let t = g as f64 * grid_step;
        while next < times.len() && times[next] <= t {
            level = level * (-alpha * (times[next] - at)).exp() + event_marks[next];
            at = times[next];
            next += 1;
        }
        path_grid.push(t);
        path_values.push(level * (-alpha * (t - at)).exp());
    }
    Ok(MarkedEventTrace {
        times,
        marks: event_marks,
        initial,
        path_grid,
        path_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_gives_zero_innovations() {
        let p = ModelParams::new(0.0, 2.0).unwrap();
        let m = MarkDistribution::reference_mixture();
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            assert_eq!(sample_innovation(&p, &m, &mut rng).unwrap(), 0.0);
        }
        let s = simulate_series(&p, &m, 50, 10, 3).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn point_mass_innovation_range() {
        let p = ModelParams::new(3.0, 0.7).unwrap();
        let c = 2.5;
        let m = MarkDistribution::point_mass(c).unwrap();
        let mut rng = stream_rng(9, 0);
        for _ in 0..2000 {
            let count = ArrivalCounter::new(p.lambda_norm).unwrap().sample(&mut rng);
            let w = innovation_with_count(&p, &m, count, &mut rng);
            let n = count as f64;
            if count == 0 {
                assert_eq!(w, 0.0);
            } else {
                assert!(
                    w > n * c * (-p.alpha_norm).exp() && w <= n * c,
                    "n={n} w={w}"
                );
            }
        }
    }

    #[test]
    fn innovation_mean() {
        let p = ModelParams::new(4.0, 1.5).unwrap();
        let m = MarkDistribution::exponential(0.5).unwrap();
        let mut rng = stream_rng(11, 0);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| sample_innovation(&p, &m, &mut rng).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        // int_0^1 exp(-a u) du = (1 - e^{-a}) / a
        let want = p.lambda_norm * m.mean() * (1.0 - (-p.alpha_norm).exp()) / p.alpha_norm;
        assert!(
            (mean - want).abs() < 4.0 * se,
            "mean={mean} want={want} se={se}"
        );
    }

    #[test]
    fn series_is_reproducible_and_streams_differ() {
        let p = ModelParams::new(100.0, 80.0).unwrap();
        let m = MarkDistribution::reference_mixture();
        let a = simulate_series(&p, &m, 500, 64, 42).unwrap();
        let b = simulate_series(&p, &m, 500, 64, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_series_stream(&p, &m, 500, 64, 42, 1).unwrap();
        assert_ne!(a.values, c.values);
        assert!(simulate_series(&p, &m, 0, 64, 42).is_err());
    }

    #[test]
    fn trace_without_arrivals_decays() {
        let p = ModelParams::new(0.0, 0.5).unwrap();
        let m = MarkDistribution::exponential(1.0).unwrap();
        let t = simulate_trace(&p, &m, 10.0, 0.5, 1).unwrap();
        assert!(t.times.is_empty());
        for (g, v) in t.path_grid.iter().zip(&t.path_values) {
            assert!((v - t.initial * (-0.5 * g).exp()).abs() <= 1e-15);
        }
    }

    #[test]
    fn trace_matches_direct_superposition() {
        let p = ModelParams::new(3.0, 0.8).unwrap();
        let m = MarkDistribution::reference_mixture();
        let t = simulate_trace(&p, &m, 50.0, 0.01, 5).unwrap();
        assert!(t.times.windows(2).all(|w| w[0] < w[1]));
        let mut rng = stream_rng(77, 0);
        for _ in 0..10 {
            let g = rng.random_range(0..t.path_grid.len());
            let at = t.path_grid[g];
            let mut direct = t.initial * (-0.8 * at).exp();
            for (tk, yk) in t.times.iter().zip(&t.marks) {
                if *tk <= at {
                    direct += yk * (-0.8 * (at - tk)).exp();
                }
            }
            assert!(
                (t.path_values[g] - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                "t={at}"
            );
        }
    }

    #[test]
    fn csv_and_binary_readers_roundtrip() {
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let m = MarkDistribution::exponential(1.0).unwrap();
        let s = simulate_series(&p, &m, 100, 64, 8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("s.csv");
        s.write_csv(std::fs::File::create(&csv).unwrap()).unwrap();
        assert_eq!(read_values_csv(&csv).unwrap(), s.values);
        let bin = dir.path().join("s.f64");
        s.write_f64le(std::fs::File::create(&bin).unwrap()).unwrap();
        assert_eq!(read_values_f64le(&bin).unwrap(), s.values);
    }
}
