//! Transport with absorbing trap nodes.
//!
//! A trap of strength `Γ` at node `r` adds `−iΓ` to the quantum Hamiltonian
//! and `+Γ` to the classical rate matrix at the diagonal entry `(r, r)`, so
//! probability leaks out of the network through the traps. Because the
//! quantum generator is no longer Hermitian, propagators are computed with a
//! dense matrix exponential rather than an eigen-expansion.
//!
//! Survival probabilities average over non-trap start and end nodes:
//! `Π_M(t) = (1/(N−M)) Σ_{j∉M} Σ_{k∉M} |⟨k|exp(−itH)|j⟩|²` and likewise
//! `P_M(t)` with `exp(−t(A + Γ))`.

use ndarray::Array2;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expm::{expm, expm_scaled};
use crate::lattice::{build_hamiltonian, CycleSpec};
use crate::numeric::{compensated_sum, mean_and_std};
use crate::transport::TimeGrid;

pub const DEFAULT_STRENGTH: f64 = 1.0;
pub const DEFAULT_REALIZATIONS: usize = 20;

/// Trap placement and strength on one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapConfig {
    spec: CycleSpec,
    traps: Vec<usize>,
    strength: f64,
    seed: Option<u64>,
}

impl TrapConfig {
    /// Explicit trap nodes (1-based, any order, no repeats).
    pub fn new(spec: CycleSpec, traps: Vec<usize>, strength: f64) -> Result<Self> {
        if !strength.is_finite() || strength <= 0.0 {
            return Err(Error::InvalidStrength(strength));
        }
        Self::build(spec, traps, strength)
    }

    fn build(spec: CycleSpec, mut traps: Vec<usize>, strength: f64) -> Result<Self> {
        let n = spec.n();
        if traps.is_empty() || traps.len() >= n {
            return Err(Error::InvalidTraps(format!(
                "need between 1 and {} traps on {spec}, got {}",
                n - 1,
                traps.len()
            )));
        }
        if let Some(&bad) = traps.iter().find(|&&r| r == 0 || r > n) {
            return Err(Error::InvalidTraps(format!("trap node {bad} outside 1..={n}")));
        }
        traps.sort_unstable();
        if let Some(w) = traps.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidTraps(format!("trap node {} listed twice", w[0])));
        }
        Ok(Self { spec, traps, strength, seed: None })
    }

    /// `count` distinct traps drawn uniformly from all `N` nodes.
    pub fn random(spec: CycleSpec, count: usize, strength: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        if count == 0 || count >= spec.n() {
            return Err(Error::InvalidTraps(format!(
                "need between 1 and {} traps on {spec}, got {count}",
                spec.n() - 1
            )));
        }
        let traps = sample(rng, spec.n(), count).into_iter().map(|i| i + 1).collect();
        Self::new(spec, traps, strength)
    }

    /// Same traps, tagged with the seed that produced them.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn spec(&self) -> CycleSpec {
        self.spec
    }

    /// Sorted 1-based trap nodes.
    pub fn traps(&self) -> &[usize] {
        &self.traps
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_trap(&self, node: usize) -> bool {
        self.traps.binary_search(&node).is_ok()
    }

    /// 0-based indices of the nodes that are not traps.
    fn free_indices(&self) -> Vec<usize> {
        (1..=self.spec.n())
            .filter(|&r| !self.is_trap(r))
            .map(|r| r - 1)
            .collect()
    }
}

/// Quantum and classical generators with traps switched on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrappedGenerators {
    /// `H₀ − iΓ` at the trap diagonals.
    pub quantum: Array2<Complex64>,
    /// `A + Γ` at the trap diagonals.
    pub classical: Array2<f64>,
}

pub fn build_trapped(config: &TrapConfig) -> TrappedGenerators {
    let mut classical = build_hamiltonian(config.spec).into_matrix();
    let mut quantum = classical.mapv(|v| Complex64::new(v, 0.0));
    for &r in &config.traps {
        quantum[[r - 1, r - 1]] -= Complex64::new(0.0, config.strength);
        classical[[r - 1, r - 1]] += config.strength;
    }
    TrappedGenerators { quantum, classical }
}

fn check_pair(n: usize, j: usize, k: usize, t: f64) -> Result<()> {
    for node in [j, k] {
        if node == 0 || node > n {
            return Err(Error::NodeOutOfRange { index: node, n });
        }
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

/// `exp(−i t H)` for the trapped quantum generator.
pub fn quantum_propagator(generators: &TrappedGenerators, t: f64) -> Array2<Complex64> {
    let minus_i = Complex64::new(0.0, -t);
    expm(&generators.quantum.mapv(|v| v * minus_i))
}

/// `exp(−t (A + Γ))` for the trapped classical generator.
pub fn classical_propagator(generators: &TrappedGenerators, t: f64) -> Array2<f64> {
    expm_scaled(&generators.classical, -t)
}

/// `|⟨k| exp(−i t H) |j⟩|²` with 1-based nodes.
pub fn trapped_quantum_transition(generators: &TrappedGenerators, j: usize, k: usize, t: f64) -> Result<f64> {
    check_pair(generators.quantum.nrows(), j, k, t)?;
    Ok(quantum_propagator(generators, t)[[k - 1, j - 1]].norm_sqr())
}

/// `⟨k| exp(−t (A + Γ)) |j⟩` with 1-based nodes.
pub fn classical_trapped_transition(generators: &TrappedGenerators, j: usize, k: usize, t: f64) -> Result<f64> {
    check_pair(generators.classical.nrows(), j, k, t)?;
    Ok(classical_propagator(generators, t)[[k - 1, j - 1]])
}

fn restricted_sum<T: Copy>(u: &Array2<T>, free: &[usize], weight: impl Fn(T) -> f64) -> f64 {
    let total = compensated_sum(
        free.iter()
            .flat_map(|&j| free.iter().map(move |&k| (k, j)))
            .map(|(k, j)| weight(u[[k, j]])),
    );
    total / free.len() as f64
}

/// Steps a propagator along the grid, one exponential per interval.
fn survival_along<T: crate::expm::Scalar>(
    generator: &Array2<T>,
    scale: T,
    grid: &TimeGrid,
    free: &[usize],
    weight: impl Fn(T) -> f64 + Copy,
) -> Vec<f64> {
    let n = generator.nrows();
    let step = |dt: f64| expm(&generator.mapv(|v| v * scale * T::from_f64(dt)));
    let mut u: Array2<T> = Array2::from_diag_elem(n, T::one());
    let mut previous = 0.0;
    // uniform grids reuse one step matrix
    let mut cached: Option<(f64, Array2<T>)> = None;
    let mut out = Vec::with_capacity(grid.len());
    for &t in grid.times() {
        let dt = t - previous;
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((h, _)) if (h - dt).abs() <= 1e-12 * dt);
            if !reuse {
                cached = Some((dt, step(dt)));
            }
            let (_, s) = cached.as_ref().expect("step matrix cached");
            u = s.dot(&u);
        }
        previous = t;
        out.push(restricted_sum(&u, free, weight));
    }
    out
}

/// `Π_M(t)` on every grid point.
pub fn quantum_survival(config: &TrapConfig, grid: &TimeGrid) -> Vec<f64> {
    let generators = build_trapped(config);
    survival_along(
        &generators.quantum,
        Complex64::new(0.0, -1.0),
        grid,
        &config.free_indices(),
        |a: Complex64| a.norm_sqr(),
    )
}

/// `P_M(t)` on every grid point.
pub fn classical_survival(config: &TrapConfig, grid: &TimeGrid) -> Vec<f64> {
    let generators = build_trapped(config);
    survival_along(&generators.classical, -1.0, grid, &config.free_indices(), |p: f64| p)
}

/// Ensemble-averaged survival probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalSeries {
    pub times: Vec<f64>,
    pub quantum_mean: Vec<f64>,
    pub quantum_std: Vec<f64>,
    pub classical_mean: Vec<f64>,
    pub classical_std: Vec<f64>,
    pub realizations: usize,
    pub seed: Option<u64>,
}

impl SurvivalSeries {
    fn from_runs(grid: &TimeGrid, runs: &[(Vec<f64>, Vec<f64>)], seed: Option<u64>) -> Self {
        let column = |quantum: bool, i: usize| -> (f64, f64) {
            let values: Vec<f64> = runs.iter().map(|r| if quantum { r.0[i] } else { r.1[i] }).collect();
            mean_and_std(&values)
        };
        let (quantum_mean, quantum_std): (Vec<f64>, Vec<f64>) =
            (0..grid.len()).map(|i| column(true, i)).unzip();
        let (classical_mean, classical_std): (Vec<f64>, Vec<f64>) =
            (0..grid.len()).map(|i| column(false, i)).unzip();
        Self {
            times: grid.times().to_vec(),
            quantum_mean,
            quantum_std,
            classical_mean,
            classical_std,
            realizations: runs.len(),
            seed,
        }
    }
}

fn survival_pair(config: &TrapConfig, grid: &TimeGrid) -> (Vec<f64>, Vec<f64>) {
    rayon::join(|| quantum_survival(config, grid), || classical_survival(config, grid))
}

/// Survival for one fixed configuration, packaged as a one-member ensemble.
pub fn single_survival(config: &TrapConfig, grid: &TimeGrid) -> SurvivalSeries {
    SurvivalSeries::from_runs(grid, &[survival_pair(config, grid)], config.seed)
}

/// Average over `realizations` independent draws of `traps` trap nodes.
///
/// All trap sets are drawn up front from one `ChaCha8Rng` seeded with
/// `seed`, so the result does not depend on the thread count.
pub fn trap_ensemble(
    spec: CycleSpec,
    traps: usize,
    strength: f64,
    realizations: usize,
    seed: u64,
    grid: &TimeGrid,
) -> Result<SurvivalSeries> {
    if realizations == 0 {
        return Err(Error::InvalidTraps("at least one realization is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = (0..realizations)
        .map(|_| TrapConfig::random(spec, traps, strength, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let runs: Vec<(Vec<f64>, Vec<f64>)> = configs.par_iter().map(|c| survival_pair(c, grid)).collect();
    Ok(SurvivalSeries::from_runs(grid, &runs, Some(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(n: usize, m: usize) -> CycleSpec {
        CycleSpec::new(n, m).unwrap()
    }

    impl TrapConfig {
        fn unchecked(spec: CycleSpec, traps: Vec<usize>, strength: f64) -> Self {
            Self::build(spec, traps, strength).unwrap()
        }
    }

    #[test]
    fn generator_entries() {
        let cfg = TrapConfig::new(spec(10, 3), vec![5], 1.0).unwrap();
        let g = build_trapped(&cfg);
        let h0 = build_hamiltonian(spec(10, 3)).into_matrix();
        for i in 0..10 {
            for j in 0..10 {
                if i == 4 && j == 4 {
                    assert_eq!(g.quantum[[i, j]], Complex64::new(4.0, -1.0));
                    assert_eq!(g.classical[[i, j]], 5.0);
                } else {
                    assert_eq!(g.quantum[[i, j]], Complex64::new(h0[[i, j]], 0.0));
                    assert_eq!(g.classical[[i, j]], h0[[i, j]]);
                }
            }
        }
    }

    #[test]
    fn zero_strength_recovers_untrapped() {
        let cfg = TrapConfig::unchecked(spec(9, 2), vec![3, 7], 0.0);
        let g = build_trapped(&cfg);
        let h0 = build_hamiltonian(spec(9, 2)).into_matrix();
        assert_eq!(g.classical, h0);
        assert_eq!(g.quantum, h0.mapv(|v| Complex64::new(v, 0.0)));
    }

    #[test]
    fn config_validation() {
        let s = spec(10, 3);
        assert!(matches!(TrapConfig::new(s, vec![], 1.0), Err(Error::InvalidTraps(_))));
        assert!(matches!(TrapConfig::new(s, (1..=10).collect(), 1.0), Err(Error::InvalidTraps(_))));
        assert!(matches!(TrapConfig::new(s, vec![0], 1.0), Err(Error::InvalidTraps(_))));
        assert!(matches!(TrapConfig::new(s, vec![11], 1.0), Err(Error::InvalidTraps(_))));
        assert!(matches!(TrapConfig::new(s, vec![2, 2], 1.0), Err(Error::InvalidTraps(_))));
        assert_eq!(TrapConfig::new(s, vec![3], 0.0), Err(Error::InvalidStrength(0.0)));
        assert!(TrapConfig::new(s, vec![3], -1.0).is_err());
        let cfg = TrapConfig::new(s, vec![9, 2, 5], 1.0).unwrap();
        assert_eq!(cfg.traps(), &[2, 5, 9]);
        assert!(cfg.is_trap(5) && !cfg.is_trap(4));
        assert_eq!(cfg.free_indices().len(), 7);
    }

    #[test]
    fn transitions_at_time_zero_are_identity() {
        let g = build_trapped(&TrapConfig::new(spec(10, 3), vec![5], 1.0).unwrap());
        for (j, k) in [(1, 1), (1, 2), (5, 5)] {
            let delta = if j == k { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(trapped_quantum_transition(&g, j, k, 0.0).unwrap(), delta, epsilon = 1e-15);
            assert_abs_diff_eq!(classical_trapped_transition(&g, j, k, 0.0).unwrap(), delta, epsilon = 1e-15);
        }
        assert!(trapped_quantum_transition(&g, 1, 2, -1.0).is_err());
        assert!(classical_trapped_transition(&g, 11, 2, 1.0).is_err());
    }

    #[test]
    fn probability_leaks_but_never_grows() {
        let g = build_trapped(&TrapConfig::new(spec(12, 5), vec![4, 9], 1.0).unwrap());
        let mut last = 1.0;
        for t in [0.5, 1.0, 3.0, 10.0] {
            let total: f64 = (1..=12).map(|k| trapped_quantum_transition(&g, 1, k, t).unwrap()).sum();
            assert!(total <= last + 1e-12);
            last = total;
        }
        assert!(last < 1.0);
    }

    #[test]
    fn survival_starts_at_one_and_decays() {
        let cfg = TrapConfig::new(spec(20, 4), vec![3, 11], 1.0).unwrap();
        let grid = TimeGrid::linear(0.0, 20.0, 41).unwrap();
        let q = quantum_survival(&cfg, &grid);
        let c = classical_survival(&cfg, &grid);
        assert_abs_diff_eq!(q[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-14);
        assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(q.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(q.iter().chain(&c).all(|&v| (0.0..=1.0 + 1e-10).contains(&v)));
    }

    #[test]
    fn stepping_matches_direct_exponential() {
        let cfg = TrapConfig::new(spec(9, 4), vec![2], 1.0).unwrap();
        let grid = TimeGrid::log_spaced(0.1, 10.0, 10).unwrap();
        let stepped = quantum_survival(&cfg, &grid);
        let g = build_trapped(&cfg);
        let free = cfg.free_indices();
        for (i, &t) in grid.times().iter().enumerate() {
            let direct = restricted_sum(&quantum_propagator(&g, t), &free, |a| a.norm_sqr());
            assert_abs_diff_eq!(stepped[i], direct, epsilon = 1e-11);
        }
    }

    #[test]
    fn ensemble_is_deterministic_and_single_draw_matches() {
        let s = spec(16, 3);
        let grid = TimeGrid::linear(0.0, 5.0, 6).unwrap();
        let a = trap_ensemble(s, 2, 1.0, 3, 99, &grid).unwrap();
        let b = trap_ensemble(s, 2, 1.0, 3, 99, &grid).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.realizations, 3);

        let one = trap_ensemble(s, 2, 1.0, 1, 7, &grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = TrapConfig::random(s, 2, 1.0, &mut rng).unwrap();
        let single = single_survival(&cfg, &grid);
        assert_eq!(one.quantum_mean, single.quantum_mean);
        assert_eq!(one.classical_mean, single.classical_mean);
        assert!(one.quantum_std.iter().all(|&v| v == 0.0));

        assert!(trap_ensemble(s, 16, 1.0, 3, 1, &grid).is_err());
        assert!(trap_ensemble(s, 2, 1.0, 0, 1, &grid).is_err());
    }
}
