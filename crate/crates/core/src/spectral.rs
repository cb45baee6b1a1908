//! Analytic Bloch eigensystem of the `G(N, m)` Hamiltonian.
//!
//! The Hamiltonian is circulant, so its eigenvectors are plane waves
//! `ψ_n(j) = exp(-i θ_n j) / √N` with `θ_n = 2πn/N`, `n = 1..=N`, and the
//! eigenvalues follow the dispersion `E(θ) = 4 − 2cos θ − 2cos mθ`.
//! Phases are reduced with integer arithmetic before any trig call, which
//! makes `E_n` and `E_{N-n}` bit-identical.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::lattice::CycleSpec;

/// Two energies closer than this belong to the same degeneracy class.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `E_m(θ) = 4 − 2cos θ − 2cos(mθ)`, with `θ` taken modulo 2π.
pub fn bloch_energy(m: usize, theta: f64) -> f64 {
    DispersionFn::new(m).energy(theta)
}

/// `(E′, E″)` of the dispersion at `θ`.
pub fn bloch_energy_derivatives(m: usize, theta: f64) -> (f64, f64) {
    let d = DispersionFn::new(m);
    (d.slope(theta), d.curvature(theta))
}

/// The continuous dispersion relation for a given long-range distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DispersionFn {
    m: usize,
}

impl DispersionFn {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn angles(&self, theta: f64) -> (f64, f64) {
        let theta = theta.rem_euclid(TAU);
        (theta, (self.m as f64 * theta).rem_euclid(TAU))
    }

    pub fn energy(&self, theta: f64) -> f64 {
        let (a, b) = self.angles(theta);
        4.0 - 2.0 * a.cos() - 2.0 * b.cos()
    }

    pub fn slope(&self, theta: f64) -> f64 {
        let (a, b) = self.angles(theta);
        2.0 * a.sin() + 2.0 * self.m as f64 * b.sin()
    }

    pub fn curvature(&self, theta: f64) -> f64 {
        let (a, b) = self.angles(theta);
        let m = self.m as f64;
        2.0 * a.cos() + 2.0 * m * m * b.cos()
    }

    /// `samples` uniformly spaced points `θ_k = 2πk/samples` on `[0, 2π)`.
    pub fn sample(&self, samples: usize) -> Vec<(f64, f64)> {
        (0..samples)
            .map(|k| {
                let theta = TAU * k as f64 / samples as f64;
                (theta, self.energy(theta))
            })
            .collect()
    }
}

/// `cos(2π r / N)` for an integer residue, symmetric in `r ↔ N − r`.
pub(crate) fn cos_residue(r: usize, n: usize) -> f64 {
    let r = r % n;
    let r = r.min(n - r);
    (TAU * r as f64 / n as f64).cos()
}

/// `exp(-2πi r / N)` for every residue `r = 0..N`.
pub(crate) fn root_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|r| {
            let phase = TAU * r as f64 / n as f64;
            Complex64::new(phase.cos(), -phase.sin())
        })
        .collect()
}

/// Energy `E_n` of Bloch mode `n` (any integer; reduced modulo `N`).
pub fn mode_energy(spec: CycleSpec, n: usize) -> f64 {
    let big_n = spec.n();
    4.0 - 2.0 * cos_residue(n, big_n) - 2.0 * cos_residue(spec.m() * (n % big_n), big_n)
}

/// Bloch phases, energies and degeneracy classes of `G(N, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    spec: CycleSpec,
    phases: Vec<f64>,
    energies: Vec<f64>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Spectrum {
    pub fn spec(&self) -> CycleSpec {
        self.spec
    }

    /// Number of modes, `N`.
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// `θ_n` for `n = 1..=N` (index `n - 1`).
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `E_n` for `n = 1..=N` (index `n - 1`).
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Energy of mode `n` in `1..=N`.
    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n - 1]
    }

    /// Degeneracy classes as sets of 1-based mode labels, ordered by energy.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Class id of mode `n` in `1..=N`.
    pub fn class_id(&self, n: usize) -> usize {
        self.class_of[n - 1]
    }

    /// Sorted multiset of class sizes. Two ranges `m`, `m′` with equal
    /// profiles are candidates for identical limiting distributions.
    pub fn class_size_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.classes.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        sizes
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Evaluate the dispersion at every `θ_n` and group equal energies.
///
/// Energies within [`DEGENERACY_TOL`] of their sorted neighbour are merged,
/// and the pairs `n ↔ N − n` are merged unconditionally.
pub fn full_spectrum(spec: CycleSpec) -> Spectrum {
    let n = spec.n();
    let phases: Vec<f64> = (1..=n).map(|k| TAU * k as f64 / n as f64).collect();
    let energies: Vec<f64> = (1..=n).into_par_iter().map(|k| mode_energy(spec, k)).collect();

    let mut uf = UnionFind::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
    for pair in order.windows(2) {
        if (energies[pair[1]] - energies[pair[0]]).abs() < DEGENERACY_TOL {
            uf.union(pair[0], pair[1]);
        }
    }
    for k in 1..n {
        // index k-1 holds mode k; its partner N-k sits at index N-k-1
        uf.union(k - 1, n - k - 1);
    }

    let mut id_of_root = vec![usize::MAX; n];
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &idx in &order {
        let root = uf.find(idx);
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = classes.len();
            classes.push(Vec::new());
        }
        let id = id_of_root[root];
        class_of[idx] = id;
        classes[id].push(idx + 1);
    }
    for class in &mut classes {
        class.sort_unstable();
    }

    Spectrum { spec, phases, energies, class_of, classes }
}

/// `⟨j|ψ_n⟩ = exp(-i θ_n j) / √N` for 1-based `n` and `j`.
pub fn bloch_amplitude(spec: CycleSpec, n: usize, j: usize) -> Result<Complex64> {
    spec.check_node(n)?;
    spec.check_node(j)?;
    let big_n = spec.n();
    let r = (n * j) % big_n;
    let phase = TAU * r as f64 / big_n as f64;
    Ok(Complex64::new(phase.cos(), -phase.sin()) / (big_n as f64).sqrt())
}
