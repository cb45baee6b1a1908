//! Power-law exponents from log-log least squares.
//!
//! Quantum return probabilities oscillate and touch zero, so they are first
//! averaged inside logarithmically spaced time bins.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::least_squares;

pub const DEFAULT_BINS_PER_DECADE: usize = 20;

const MIN_POINTS: usize = 10;
const MIN_BINS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Binning {
    None,
    LogBins { per_decade: usize },
}

impl Binning {
    pub fn log_bins() -> Self {
        Binning::LogBins { per_decade: DEFAULT_BINS_PER_DECADE }
    }
}

/// Result of fitting `value ≈ exp(intercept) · t^slope`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    /// Intercept of `ln(value)` against `ln(t)`.
    pub intercept: f64,
    /// RMS residual in `ln(value)`.
    pub rms: f64,
    pub tmin: f64,
    pub tmax: f64,
    pub binning: Binning,
    /// Number of (binned) points entering the regression.
    pub points: usize,
}

impl ScalingFit {
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.slope * t.ln()).exp()
    }
}

/// Average `values` inside log-spaced bins covering `[tmin, tmax]`.
///
/// Returns `(t, mean)` per non-empty bin, where `t` is the geometric mean
/// of the sample times that fell in the bin.
pub fn log_bin(
    times: &[f64],
    values: &[f64],
    tmin: f64,
    tmax: f64,
    per_decade: usize,
) -> Vec<(f64, f64)> {
    assert_eq!(times.len(), values.len());
    let decades = (tmax / tmin).log10();
    let bins = ((decades * per_decade as f64 - 1e-9).ceil() as usize).max(1);
    let mut log_t = vec![0.0; bins];
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (&t, &v) in times.iter().zip(values) {
        if t < tmin || t > tmax {
            continue;
        }
        let b = (((t / tmin).log10() * per_decade as f64).floor() as usize).min(bins - 1);
        log_t[b] += t.ln();
        sum[b] += v;
        count[b] += 1;
    }
    (0..bins)
        .filter(|&b| count[b] > 0)
        .map(|b| {
            let c = count[b] as f64;
            ((log_t[b] / c).exp(), sum[b] / c)
        })
        .collect()
}

/// Least-squares slope of `ln(value)` against `ln(t)` over `[tmin, tmax]`.
pub fn fit_power_law(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    binning: Binning,
) -> Result<ScalingFit> {
    let (tmin, tmax) = window;
    let in_window = times.iter().filter(|&&t| t >= tmin && t <= tmax).count();
    if !(tmin > 0.0 && tmax > tmin) || in_window < MIN_POINTS {
        return Err(Error::EmptyWindow { tmin, tmax, found: in_window, needed: MIN_POINTS });
    }
    let points: Vec<(f64, f64)> = match binning {
        Binning::None => times
            .iter()
            .zip(values)
            .filter(|(&t, _)| t >= tmin && t <= tmax)
            .map(|(&t, &v)| (t, v))
            .collect(),
        Binning::LogBins { per_decade } => log_bin(times, values, tmin, tmax, per_decade),
    };
    if points.len() < MIN_BINS {
        return Err(Error::EmptyWindow { tmin, tmax, found: points.len(), needed: MIN_BINS });
    }
    if let Some(&(t, value)) = points.iter().find(|(_, v)| v.is_nan() || *v <= 0.0) {
        return Err(Error::NonPositiveValue { t, value });
    }
    let x: Vec<f64> = points.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept, rms) = least_squares(&x, &y);
    Ok(ScalingFit { slope, intercept, rms, tmin, tmax, binning, points: points.len() })
}
