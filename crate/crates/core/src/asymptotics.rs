//! Stationary-phase estimates of the continuum return probabilities.
//!
//! For large `λ`, `(1/2π) ∫ exp(-λ f(θ)) dθ` is dominated by the stationary
//! points of `f`, each contributing `exp(-λ f(θ_i)) / sqrt(2π λ f″(θ_i))`.
//! Here `f` is the dispersion `E_m`, which has exactly `m` minima and `m`
//! maxima on `[0, 2π)`; `λ = t` gives the classical walk and `λ = i t` the
//! quantum walk.
//!
//! With imaginary `λ` the square root needs a branch. [`SqrtBranch::Principal`]
//! takes the principal root of the whole product, so a point contributes the
//! phase `exp(∓iπ/4)` for `E″ ≷ 0`; this is the textbook stationary-phase
//! rule and reproduces the exact `m = 2` return probability.
//! [`SqrtBranch::Factored`] takes `sqrt(2πλ) · sqrt(E″)` root by root, which
//! turns the maxima phase into `exp(-3iπ/4)`; the alternative `m = 2` closed
//! form with negative sine terms ([`quantum_spa_m2_factored`]) follows from
//! that choice.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::DispersionFn;

/// Residual `|E′|` a refined stationary point must reach.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Minimum,
    Maximum,
}

impl fmt::Display for Extremum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extremum::Minimum => "min",
            Extremum::Maximum => "max",
        })
    }
}

impl FromStr for Extremum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" | "minimum" => Ok(Extremum::Minimum),
            "max" | "maximum" => Ok(Extremum::Maximum),
            other => Err(format!("unknown extremum '{other}', expected min or max")),
        }
    }
}

/// A root of `E′_m` on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub theta: f64,
    pub kind: Extremum,
    pub energy: f64,
    pub curvature: f64,
}

impl StationaryPoint {
    fn at(dispersion: &DispersionFn, theta: f64) -> Result<Self> {
        let curvature = dispersion.curvature(theta);
        if curvature == 0.0 {
            return Err(Error::ZeroCurvature { theta });
        }
        let kind = if curvature > 0.0 { Extremum::Minimum } else { Extremum::Maximum };
        Ok(Self { theta, kind, energy: dispersion.energy(theta), curvature })
    }
}

fn refine_root(d: &DispersionFn, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = d.slope(lo);
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = d.slope(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (lo, hi);
    let mut x = 0.5 * (a + b);
    for _ in 0..20 {
        let f = d.slope(x);
        if f.abs() < ROOT_TOL {
            break;
        }
        let next = x - f / d.curvature(x);
        // a Newton step leaving the final bracket cannot improve on bisection
        if !(a - 1e-12..=b + 1e-12).contains(&next) {
            break;
        }
        x = next;
    }
    x
}

/// All `2m` stationary points of `E_m`, sorted by `θ`.
///
/// `E′` is sampled on `8m` cell-centred points, each sign change is bisected
/// and then polished with Newton steps.
pub fn stationary_points(m: usize) -> Result<Vec<StationaryPoint>> {
    if m < 2 {
        return Err(Error::RangeTooShort { m });
    }
    let d = DispersionFn::new(m);
    let samples = 8 * m;
    let step = TAU / samples as f64;
    let thetas: Vec<f64> = (0..samples).map(|k| (k as f64 + 0.5) * step).collect();
    let slopes: Vec<f64> = thetas.iter().map(|&x| d.slope(x)).collect();

    let mut roots = Vec::with_capacity(2 * m);
    for k in 0..samples {
        let (lo, f_lo) = (thetas[k], slopes[k]);
        let (hi, f_hi) = if k + 1 < samples {
            (thetas[k + 1], slopes[k + 1])
        } else {
            (thetas[0] + TAU, slopes[0])
        };
        if f_lo == 0.0 {
            roots.push(lo);
        } else if (f_lo > 0.0) != (f_hi > 0.0) && f_hi != 0.0 {
            roots.push(refine_root(&d, lo, hi));
        }
    }

    let mut points = roots
        .into_iter()
        .map(|x| {
            let mut theta = x.rem_euclid(TAU);
            if TAU - theta < 1e-9 {
                theta = 0.0;
            }
            StationaryPoint::at(&d, theta)
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let minima = points.iter().filter(|p| p.kind == Extremum::Minimum).count();
    let alternates = points.windows(2).all(|w| w[0].kind != w[1].kind);
    if points.len() != 2 * m || minima != m || !alternates {
        return Err(Error::StationaryPointCount { expected: 2 * m, found: points.len() });
    }
    Ok(points)
}

/// Whether the large parameter is `t` (classical) or `i t` (quantum).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaScale {
    Real,
    Imaginary,
}

/// How `1 / sqrt(2π λ E″)` is continued to complex arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SqrtBranch {
    /// Principal root of the full product.
    #[default]
    Principal,
    /// Product of the principal roots of `2πλ` and `E″`.
    Factored,
}

fn sqrt_phase(scale: SpaScale, curvature: f64, branch: SqrtBranch) -> f64 {
    let negative = curvature < 0.0;
    match (scale, branch, negative) {
        (SpaScale::Real, _, false) => 0.0,
        (SpaScale::Real, _, true) => FRAC_PI_2,
        (SpaScale::Imaginary, _, false) => FRAC_PI_4,
        (SpaScale::Imaginary, SqrtBranch::Principal, true) => -FRAC_PI_4,
        (SpaScale::Imaginary, SqrtBranch::Factored, true) => FRAC_PI_4 + FRAC_PI_2,
    }
}

/// Sum of leading-order stationary-phase contributions,
/// `Σ_i exp(-λ E(θ_i)) / sqrt(2π λ E″(θ_i))` with `λ = t` or `λ = i t`.
pub fn spa_generic(
    points: &[StationaryPoint],
    scale: SpaScale,
    t: f64,
    branch: SqrtBranch,
) -> Result<Complex64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for p in points {
        if p.curvature == 0.0 {
            return Err(Error::ZeroCurvature { theta: p.theta });
        }
        let weight = (TAU * t * p.curvature.abs()).sqrt();
        let root = Complex64::from_polar(weight, sqrt_phase(scale, p.curvature, branch));
        let exponent = match scale {
            SpaScale::Real => Complex64::new((-t * p.energy).exp(), 0.0),
            SpaScale::Imaginary => Complex64::from_polar(1.0, -t * p.energy),
        };
        total += exponent / root;
    }
    Ok(total)
}

/// Which closed form or sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Full stationary-point sum.
    #[default]
    Auto,
    /// Global minimum only.
    Small,
    /// Continuum limit of many equidistant stationary points.
    Large,
    /// Full stationary-point sum.
    Sum,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Auto => "auto",
            Regime::Small => "small",
            Regime::Large => "large",
            Regime::Sum => "sum",
        })
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Regime::Auto),
            "small" => Ok(Regime::Small),
            "large" => Ok(Regime::Large),
            "sum" => Ok(Regime::Sum),
            other => Err(format!("unknown regime '{other}'")),
        }
    }
}

fn positive_time(t: f64) -> Result<()> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(())
}

/// Minima-only stationary-point sum for the classical return probability.
pub fn classical_spa_sum(points: &[StationaryPoint], t: f64) -> Result<f64> {
    let minima: Vec<StationaryPoint> = points
        .iter()
        .copied()
        .filter(|p| p.kind == Extremum::Minimum)
        .collect();
    Ok(spa_generic(&minima, SpaScale::Real, t, SqrtBranch::Principal)?.re)
}

/// Stationary-phase estimate of the classical return probability `p_m(t)`.
///
/// * `Small`: `1 / sqrt(4π t (1 + m²))`, the `θ = 0` term alone.
/// * `Large`: `1 / (4π t)`.
/// * `Sum` / `Auto`: the sum over all `m` minima.
pub fn classical_spa(m: usize, t: f64, regime: Regime) -> Result<f64> {
    positive_time(t)?;
    let m_f = m as f64;
    match regime {
        Regime::Small => Ok(1.0 / (4.0 * PI * t * (1.0 + m_f * m_f)).sqrt()),
        Regime::Large => Ok(1.0 / (4.0 * PI * t)),
        Regime::Sum | Regime::Auto => classical_spa_sum(&stationary_points(m)?, t),
    }
}

/// Stationary-phase estimate of the quantum return probability `π_m(t)`.
///
/// * `Small`: the `m = 2` closed form for `m = 2`, otherwise the full sum.
/// * `Large`: `sin²(4t) / (4π² t²)`.
/// * `Sum` / `Auto`: `|Σ over all 2m points|²` with the principal branch.
pub fn quantum_spa(m: usize, t: f64, regime: Regime) -> Result<f64> {
    positive_time(t)?;
    match regime {
        Regime::Small if m == 2 => quantum_spa_m2(t),
        Regime::Large => quantum_spa_large_m(t),
        _ => Ok(spa_generic(&stationary_points(m)?, SpaScale::Imaginary, t, SqrtBranch::Principal)?
            .norm_sqr()),
    }
}

/// Closed-form stationary-phase `π_2(t)` under the principal branch,
/// `(12 + √15 cos 4t + 4√5 sin(9t/4) + 4√3 sin(25t/4)) / (30π t)`.
pub fn quantum_spa_m2(t: f64) -> Result<f64> {
    positive_time(t)?;
    Ok((12.0 + 15f64.sqrt() * (4.0 * t).cos()
        + 4.0 * 5f64.sqrt() * (9.0 * t / 4.0).sin()
        + 4.0 * 3f64.sqrt() * (25.0 * t / 4.0).sin())
        / (30.0 * PI * t))
}

/// The `m = 2` closed form with negative sine terms,
/// `(12 + √15 cos 4t − 4√5 sin(9t/4) − 4√3 sin(25t/4)) / (30π t)`,
/// which is the factored-branch assembly.
pub fn quantum_spa_m2_factored(t: f64) -> Result<f64> {
    positive_time(t)?;
    Ok((12.0 + 15f64.sqrt() * (4.0 * t).cos()
        - 4.0 * 5f64.sqrt() * (9.0 * t / 4.0).sin()
        - 4.0 * 3f64.sqrt() * (25.0 * t / 4.0).sin())
        / (30.0 * PI * t))
}

/// Large-`m` closed form `sin²(4t) / (4π² t²)`.
pub fn quantum_spa_large_m(t: f64) -> Result<f64> {
    positive_time(t)?;
    Ok((4.0 * t).sin().powi(2) / (4.0 * PI * PI * t * t))
}

/// Large-`m` envelope estimate assembled term by term with the principal
/// branch, `(1 + sin 4t)² / (4π² t²)`.
pub fn quantum_spa_large_m_principal(t: f64) -> Result<f64> {
    positive_time(t)?;
    Ok((1.0 + (4.0 * t).sin()).powi(2) / (4.0 * PI * PI * t * t))
}

/// Smooth curves through the minima (`2 − 2cos θ`) and maxima
/// (`6 − 2cos θ`) of `E_m` at large `m`.
pub fn theta_envelope(kind: Extremum, theta: f64) -> f64 {
    match kind {
        Extremum::Minimum => 2.0 - 2.0 * theta.cos(),
        Extremum::Maximum => 6.0 - 2.0 * theta.cos(),
    }
}
