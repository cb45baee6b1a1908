//! Classical (CTRW) and quantum (CTQW) transport on `G(N, m)`.
//!
//! Every quantity here is a spectral sum over the Bloch modes, so nothing
//! materialises the `N × N` Hamiltonian:
//!
//! * `p_{k,j}(t)  = (1/N) Σ_n exp(-t E_n) exp(-i d θ_n)`,
//! * `π_{k,j}(t)  = |(1/N) Σ_n exp(-i t E_n) exp(-i d θ_n)|²`,
//!
//! with `d = (k − j) mod N`. Full displacement profiles are computed with
//! one FFT per time point.

mod continuum;
mod fit;
mod limiting;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::CycleSpec;
use crate::spectral::{cos_residue, root_table, Spectrum};

pub use continuum::{continuum_return, continuum_return_at, quadrature_points, QUADRATURE_TOL};
pub use fit::{fit_power_law, log_bin, Binning, ScalingFit, DEFAULT_BINS_PER_DECADE};
pub use limiting::{
    asymmetry, asymmetry_scan, chi_at, limiting_distribution, Asymmetry, LimitingDistribution,
};

/// Classical random walk or quantum walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Classical,
    Quantum,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Classical => "classical",
            Kind::Quantum => "quantum",
        })
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classical" => Ok(Kind::Classical),
            "quantum" => Ok(Kind::Quantum),
            other => Err(format!("unknown kind '{other}', expected classical or quantum")),
        }
    }
}

/// Strictly increasing, non-negative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidGrid("no time points".into()));
        }
        if let Some(&t) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite time {t}")));
        }
        if times[0] < 0.0 {
            return Err(Error::InvalidGrid(format!("first time {} is negative", times[0])));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "times not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    /// `points_per_decade` logarithmically spaced points per decade, both
    /// endpoints included.
    pub fn log_spaced(tmin: f64, tmax: f64, points_per_decade: usize) -> Result<Self> {
        if !(tmin > 0.0 && tmax > tmin) || points_per_decade == 0 {
            return Err(Error::InvalidGrid(format!(
                "log grid needs 0 < tmin < tmax and ppd > 0, got [{tmin}, {tmax}] ppd {points_per_decade}"
            )));
        }
        let (lo, hi) = (tmin.log10(), tmax.log10());
        let intervals = (((hi - lo) * points_per_decade as f64).round() as usize).max(1);
        let mut times: Vec<f64> = (0..=intervals)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / intervals as f64))
            .collect();
        times[0] = tmin;
        times[intervals] = tmax;
        Self::new(times)
    }

    /// `points` evenly spaced points on `[tmin, tmax]`.
    pub fn linear(tmin: f64, tmax: f64, points: usize) -> Result<Self> {
        if points < 2 || tmax.is_nan() || tmin.is_nan() || tmax <= tmin {
            return Err(Error::InvalidGrid(format!(
                "linear grid needs tmin < tmax and at least 2 points, got [{tmin}, {tmax}] x {points}"
            )));
        }
        let step = (tmax - tmin) / (points - 1) as f64;
        let mut times: Vec<f64> = (0..points).map(|i| tmin + step * i as f64).collect();
        times[points - 1] = tmax;
        Self::new(times)
    }

    /// 100 points per decade on `[0.1, 10^4]`.
    pub fn default_log() -> Self {
        Self::log_spaced(0.1, 1e4, 100).expect("default grid is valid")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("grid is non-empty")
    }
}

/// Transition probabilities for every displacement at every grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    spec: CycleSpec,
    kind: Kind,
    grid: TimeGrid,
    values: Vec<Vec<f64>>,
}

impl ProbabilityField {
    pub fn spec(&self) -> CycleSpec {
        self.spec
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Raw values at grid index `i`, indexed by displacement `d = (k − j) mod N`.
    /// Round-off may leave entries slightly below zero.
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Values at grid index `i` clamped to `[0, 1]` for output.
    pub fn clamped(&self, i: usize) -> Vec<f64> {
        self.values[i].iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }

    /// Probability of going from node `j` to node `k` (1-based) at grid index `i`.
    pub fn probability(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        let d = self.spec.displacement(j, k)?;
        Ok(self.values[i][d])
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// `p_{k,j}(t) = (1/N) Σ_n exp(-t E_n) cos(d θ_n)`.
pub fn classical_transition(spectrum: &Spectrum, j: usize, k: usize, t: f64) -> Result<f64> {
    check_time(t)?;
    let spec = spectrum.spec();
    let d = spec.displacement(j, k)?;
    let n = spec.n();
    let sum: f64 = spectrum
        .energies()
        .iter()
        .enumerate()
        .map(|(idx, &e)| (-t * e).exp() * cos_residue(d * (idx + 1), n))
        .sum();
    Ok((sum / n as f64).clamp(0.0, 1.0))
}

/// Complex amplitude `α_{k,j}(t) = (1/N) Σ_n exp(-i t E_n) exp(-i d θ_n)`.
pub fn quantum_amplitude(spectrum: &Spectrum, j: usize, k: usize, t: f64) -> Result<Complex64> {
    check_time(t)?;
    let spec = spectrum.spec();
    let d = spec.displacement(j, k)?;
    let n = spec.n();
    let roots = root_table(n);
    let sum: Complex64 = spectrum
        .energies()
        .iter()
        .enumerate()
        .map(|(idx, &e)| Complex64::from_polar(1.0, -t * e) * roots[(d * (idx + 1)) % n])
        .sum();
    Ok(sum / n as f64)
}

/// `π_{k,j}(t) = |α_{k,j}(t)|²`.
pub fn quantum_transition(spectrum: &Spectrum, j: usize, k: usize, t: f64) -> Result<f64> {
    Ok(quantum_amplitude(spectrum, j, k, t)?.norm_sqr().clamp(0.0, 1.0))
}

/// Transition probabilities for all displacements on a time grid.
pub fn propagator_field(spectrum: &Spectrum, kind: Kind, grid: &TimeGrid) -> ProbabilityField {
    let spec = spectrum.spec();
    let n = spec.n();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let energies = spectrum.energies();
    let values = grid
        .times()
        .par_iter()
        .map(|&t| {
            // slot r holds mode n ≡ r (mod N); mode N sits at slot 0
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for (idx, &e) in energies.iter().enumerate() {
                buf[(idx + 1) % n] = match kind {
                    Kind::Classical => Complex64::new((-t * e).exp(), 0.0),
                    Kind::Quantum => Complex64::from_polar(1.0, -t * e),
                };
            }
            fft.process(&mut buf);
            let scale = 1.0 / n as f64;
            buf.iter()
                .map(|z| match kind {
                    Kind::Classical => z.re * scale,
                    Kind::Quantum => (z * scale).norm_sqr(),
                })
                .collect()
        })
        .collect();
    ProbabilityField { spec, kind, grid: grid.clone(), values }
}

/// Average classical return probability `p(t) = (1/N) Σ_n exp(-t E_n)`.
pub fn return_probability_classical(spectrum: &Spectrum, grid: &TimeGrid) -> Vec<f64> {
    let energies = spectrum.energies();
    let n = energies.len() as f64;
    grid.times()
        .par_iter()
        .map(|&t| energies.iter().map(|&e| (-t * e).exp()).sum::<f64>() / n)
        .collect()
}

/// Average quantum return probability `π(t) = |(1/N) Σ_n exp(-i t E_n)|²`.
pub fn return_probability_quantum(spectrum: &Spectrum, grid: &TimeGrid) -> Vec<f64> {
    let energies = spectrum.energies();
    let n = energies.len() as f64;
    grid.times()
        .par_iter()
        .map(|&t| {
            let (re, im) = energies.iter().fold((0.0, 0.0), |(re, im), &e| {
                let (s, c) = (t * e).sin_cos();
                (re + c, im - s)
            });
            (re * re + im * im) / (n * n)
        })
        .collect()
}

/// Return probability of the requested kind.
pub fn return_probability(spectrum: &Spectrum, kind: Kind, grid: &TimeGrid) -> Vec<f64> {
    match kind {
        Kind::Classical => return_probability_classical(spectrum, grid),
        Kind::Quantum => return_probability_quantum(spectrum, grid),
    }
}
