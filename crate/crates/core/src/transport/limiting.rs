//! Long-time averages of the quantum transition probabilities.
//!
//! The time average of `π_{k,j}(t)` keeps only the pairs of modes with equal
//! energy. Grouping the double sum by degeneracy class gives
//!
//! `χ_d = (1/N²) Σ_classes |Σ_{n ∈ class} exp(-i d θ_n)|²`,
//!
//! which costs `O(N)` per displacement instead of `O(N²)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::CycleSpec;
use crate::spectral::{full_spectrum, root_table, Spectrum};

/// Limiting distribution `χ` for one start node, indexed by displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingDistribution {
    spec: CycleSpec,
    start: usize,
    values: Vec<f64>,
}

impl LimitingDistribution {
    pub fn spec(&self) -> CycleSpec {
        self.spec
    }

    /// Start node `j` (1-based).
    pub fn start(&self) -> usize {
        self.start
    }

    /// `χ_d` for `d = 0..N`.
    pub fn by_displacement(&self) -> &[f64] {
        &self.values
    }

    /// `χ_{k,j}` for a 1-based target node `k`.
    pub fn at_node(&self, k: usize) -> Result<f64> {
        let d = self.spec.displacement(self.start, k)?;
        Ok(self.values[d])
    }

    /// `(k, χ_{k,j})` for `k = 1..=N`.
    pub fn by_node(&self) -> Vec<(usize, f64)> {
        let n = self.spec.n();
        (1..=n)
            .map(|k| (k, self.values[(k + n - self.start) % n]))
            .collect()
    }
}

fn chi_with_roots(spectrum: &Spectrum, roots: &[Complex64], d: usize) -> f64 {
    let n = spectrum.len();
    let total: f64 = spectrum
        .classes()
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|&mode| roots[(d * mode) % n])
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum();
    total / (n * n) as f64
}

/// `χ_d` for a single displacement.
pub fn chi_at(spectrum: &Spectrum, d: usize) -> f64 {
    let n = spectrum.len();
    chi_with_roots(spectrum, &root_table(n), d % n)
}

/// Full limiting distribution for start node `j`.
pub fn limiting_distribution(spectrum: &Spectrum, j: usize) -> Result<LimitingDistribution> {
    let spec = spectrum.spec();
    spec.check_node(j)?;
    let n = spec.n();
    let roots = root_table(n);
    let values = (0..n)
        .into_par_iter()
        .map(|d| chi_with_roots(spectrum, &roots, d))
        .collect();
    Ok(LimitingDistribution { spec, start: j, values })
}

/// Return weight against antipodal weight on an even ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymmetry {
    pub n: usize,
    pub m: usize,
    /// `χ_{1,1}`
    pub chi_start: f64,
    /// `χ_{N/2+1,1}`
    pub chi_opposite: f64,
    /// `(χ_{1,1} − χ_{N/2+1,1}) / (χ_{1,1} + χ_{N/2+1,1})`
    pub delta: f64,
}

/// `Δ(1, N/2)` for an even ring.
pub fn asymmetry(spectrum: &Spectrum) -> Result<Asymmetry> {
    let spec = spectrum.spec();
    let n = spec.n();
    if !n.is_multiple_of(2) {
        return Err(Error::OddRing(n));
    }
    // exp(-i (N/2) θ_n) = (-1)^n, so both sums are real
    let (mut start, mut opposite) = (0.0, 0.0);
    for class in spectrum.classes() {
        let size = class.len() as f64;
        let signed: f64 = class.iter().map(|&k| if k % 2 == 0 { 1.0 } else { -1.0 }).sum();
        start += size * size;
        opposite += signed * signed;
    }
    let norm = (n * n) as f64;
    let (chi_start, chi_opposite) = (start / norm, opposite / norm);
    Ok(Asymmetry {
        n,
        m: spec.m(),
        chi_start,
        chi_opposite,
        delta: (chi_start - chi_opposite) / (chi_start + chi_opposite),
    })
}

/// `Δ(1, N/2)` for every even `N` in `[n_min, n_max]` where `G(N, m)` is valid.
pub fn asymmetry_scan(m: usize, n_min: usize, n_max: usize) -> Result<Vec<Asymmetry>> {
    if !n_min.is_multiple_of(2) {
        return Err(Error::OddRing(n_min));
    }
    if !n_max.is_multiple_of(2) {
        return Err(Error::OddRing(n_max));
    }
    let sizes: Vec<usize> = (n_min..=n_max).step_by(2).collect();
    sizes
        .into_par_iter()
        .filter_map(|n| CycleSpec::new(n, m).ok())
        .map(|spec| asymmetry(&full_spectrum(spec)))
        .collect()
}
