//! Infinite-ring limit of the return probabilities,
//!
//! `p_m(t) = (1/2π) ∫ exp(-t E_m(θ)) dθ` and
//! `π_m(t) = |(1/2π) ∫ exp(-i t E_m(θ)) dθ|²`,
//!
//! evaluated with the periodic trapezoid rule. The integrand oscillates at a
//! rate proportional to `t`, so the node count starts at
//! `max(2^14, 64 m, ceil(8 t))` and doubles (reusing the previous nodes)
//! until the amplitude changes by less than [`QUADRATURE_TOL`].

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Kind, TimeGrid};
use crate::error::{Error, Result};
use crate::spectral::cos_residue;

/// Relative change between successive doublings accepted as converged.
pub const QUADRATURE_TOL: f64 = 1e-6;

const MAX_POINTS: usize = 1 << 28;

/// Initial trapezoid node count for time `t`.
pub fn quadrature_points(m: usize, t: f64) -> usize {
    (1usize << 14).max(64 * m).max((8.0 * t).ceil() as usize)
}

fn integrand(kind: Kind, m: usize, t: f64, k: usize, q: usize) -> Complex64 {
    let e = 4.0 - 2.0 * cos_residue(k, q) - 2.0 * cos_residue((m * k) % q, q);
    match kind {
        Kind::Classical => Complex64::new((-t * e).exp(), 0.0),
        Kind::Quantum => Complex64::from_polar(1.0, -t * e),
    }
}

/// Sum of the integrand over nodes `start, start + stride, ...` of a `q`-point grid.
fn strided_sum(kind: Kind, m: usize, t: f64, q: usize, start: usize, stride: usize) -> Complex64 {
    (start..q).step_by(stride).map(|k| integrand(kind, m, t, k, q)).sum()
}

/// Converged continuum value at a single time.
pub fn continuum_return_at(kind: Kind, m: usize, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let mut q = quadrature_points(m, t);
    let mut sum = strided_sum(kind, m, t, q, 0, 1);
    let mut mean = sum / q as f64;
    loop {
        if 2 * q > MAX_POINTS {
            return Err(Error::QuadratureNotConverged { tol: QUADRATURE_TOL, points: q });
        }
        // nodes of the doubled grid not already in the current one
        let odd = strided_sum(kind, m, t, 2 * q, 1, 2);
        sum += odd;
        q *= 2;
        let refined = sum / q as f64;
        let change = (refined - mean).norm();
        mean = refined;
        if change <= QUADRATURE_TOL * refined.norm() + 1e-15 {
            break;
        }
    }
    Ok(match kind {
        Kind::Classical => mean.re,
        Kind::Quantum => mean.norm_sqr(),
    })
}

/// Continuum return probability on every grid point.
pub fn continuum_return(kind: Kind, m: usize, grid: &TimeGrid) -> Result<Vec<f64>> {
    grid.times()
        .par_iter()
        .map(|&t| continuum_return_at(kind, m, t))
        .collect()
}
