//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use lric_core::asymptotics::{
    quantum_spa_large_m, quantum_spa_large_m_principal, quantum_spa_m2, quantum_spa_m2_factored,
    stationary_points, Extremum,
};
use lric_core::lattice::build_hamiltonian;
use lric_core::numeric::least_squares;
use lric_core::spectral::{full_spectrum, DispersionFn};
use lric_core::transport::{
    asymmetry, asymmetry_scan, continuum_return_at, fit_power_law, limiting_distribution, log_bin,
    propagator_field, return_probability, Binning, Kind, TimeGrid, DEFAULT_BINS_PER_DECADE,
};
use lric_core::trapping::trap_ensemble;
use lric_core::{CycleSpec, Spectrum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RING: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, notes: Vec::new() }
    }

    fn note(mut self, note: String) -> Self {
        self.notes.push(note);
        self
    }
}

fn spectrum(n: usize, m: usize) -> Spectrum {
    full_spectrum(CycleSpec::new(n, m).unwrap())
}

fn slope(kind: Kind, m: usize, window: (f64, f64), ppd: usize, binning: Binning) -> f64 {
    slope_on(RING, kind, m, window, ppd, binning)
}

fn slope_on(n: usize, kind: Kind, m: usize, window: (f64, f64), ppd: usize, binning: Binning) -> f64 {
    let grid = TimeGrid::log_spaced(window.0, window.1, ppd).unwrap();
    let values = return_probability(&spectrum(n, m), kind, &grid);
    fit_power_law(grid.times(), &values, window, binning).unwrap().slope
}

/// Largest relative deviation between log-binned exact values and a model.
fn binned_relative_error(m: usize, window: (f64, f64), model: impl Fn(f64) -> f64) -> f64 {
    let grid = TimeGrid::log_spaced(window.0, window.1, 1000).unwrap();
    let exact = return_probability(&spectrum(RING, m), Kind::Quantum, &grid);
    let predicted: Vec<f64> = grid.times().iter().map(|&t| model(t)).collect();
    let bin = |v: &[f64]| log_bin(grid.times(), v, window.0, window.1, DEFAULT_BINS_PER_DECADE);
    bin(&exact)
        .iter()
        .zip(bin(&predicted))
        .map(|(&(_, e), (_, p))| (e / p - 1.0).abs())
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let slopes: Vec<(usize, f64)> = [2, 10]
        .iter()
        .map(|&m| (m, slope(Kind::Classical, m, (10.0, 1e3), 100, Binning::None)))
        .collect();
    let pass = slopes.iter().all(|&(_, s)| (s + 0.5).abs() <= 0.05);
    let detail = slopes
        .iter()
        .map(|(m, s)| format!("m={m} slope {s:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(pass, format!("{detail} (target -0.5 ± 0.05)"))
}

fn criterion_2() -> Outcome {
    let s = slope(Kind::Classical, 100, (1.0, 1e2), 100, Binning::None);
    let grid = TimeGrid::log_spaced(10.0, 1e2, 100).unwrap();
    let p = return_probability(&spectrum(RING, 100), Kind::Classical, &grid);
    let worst = grid
        .times()
        .iter()
        .zip(&p)
        .map(|(&t, &v)| (v * 4.0 * std::f64::consts::PI * t - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = (s + 1.0).abs() <= 0.10 && worst < 0.15;
    Outcome::new(pass, format!("m=100 slope {s:.4} (target -1 ± 0.1), max |4πt·p - 1| {worst:.4} (< 0.15)"))
}

fn criterion_3() -> Outcome {
    let bins = Binning::log_bins();
    let s2 = slope(Kind::Quantum, 2, (10.0, 1e3), 1000, bins);
    let s10 = slope(Kind::Quantum, 10, (10.0, 1e3), 1000, bins);
    let err = binned_relative_error(2, (10.0, 1e2), |t| quantum_spa_m2(t).unwrap());
    let factored = binned_relative_error(2, (10.0, 1e2), |t| quantum_spa_m2_factored(t).unwrap());
    let pass = (s2 + 1.0).abs() <= 0.10 && (s10 + 1.0).abs() <= 0.10 && err < 0.10;
    Outcome::new(
        pass,
        format!(
            "binned slopes m=2 {s2:.4}, m=10 {s10:.4} (target -1 ± 0.1); m=2 closed form binned rel. error {err:.4} (< 0.1)"
        ),
    )
    .note(format!("closed form with negative sine terms: binned rel. error {factored:.3} (not gated)"))
    .note(format!(
        "m=10 binned slope on N=100000: {:.4} (not gated)",
        slope_on(100_000, Kind::Quantum, 10, (10.0, 1e3), 1000, bins)
    ))
}

fn criterion_4() -> Outcome {
    let s = slope(Kind::Quantum, 100, (10.0, 1e3), 1000, Binning::log_bins());
    let err = binned_relative_error(100, (10.0, 1e2), |t| quantum_spa_large_m(t).unwrap());
    let assembled = binned_relative_error(100, (10.0, 1e2), |t| quantum_spa_large_m_principal(t).unwrap());
    let pass = (s + 2.0).abs() <= 0.15 && err < 0.15;
    Outcome::new(
        pass,
        format!("m=100 binned slope {s:.4} (target -2 ± 0.15); sin²(4t)/(4π²t²) binned rel. error {err:.3} (< 0.15)"),
    )
    .note(format!("(1 + sin 4t)²/(4π²t²): binned rel. error {assembled:.3} (not gated)"))
}

fn criterion_5() -> Outcome {
    let symmetric = (2..=10).all(|m| {
        let chi = limiting_distribution(&spectrum(100, m), 1).unwrap();
        (chi.at_node(1).unwrap() - chi.at_node(51).unwrap()).abs() < 1e-10
    });
    let delta108 = asymmetry(&spectrum(108, 2)).unwrap().delta;

    let mut fits = Vec::new();
    for m in [2, 3, 4] {
        let rows = asymmetry_scan(m, 20, 500).unwrap();
        let (x, y): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.delta.abs() > 1e-6)
            .map(|r| ((r.n as f64).ln(), r.delta.abs().ln()))
            .unzip();
        let slope = (x.len() >= 3).then(|| least_squares(&x, &y).0);
        fits.push((m, x.len(), slope));
    }
    let cluster_ok = fits.iter().any(|f| f.2.is_some())
        && fits.iter().all(|&(_, _, s)| s.is_none_or(|s| (s + 1.0).abs() <= 0.2));
    let pass = symmetric && delta108.abs() > 1e-6 && cluster_ok;
    let fit_text = fits
        .iter()
        .map(|(m, count, s)| match s {
            Some(s) => format!("m={m}: {count} sizes, slope {s:.3}"),
            None => format!("m={m}: {count} sizes, no fit"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(
        pass,
        format!(
            "N=100 χ(1)=χ(51) for m=2..10: {symmetric}; |Δ| at N=108, m=2: {:.4e} (> 1e-6); {fit_text} (target -1 ± 0.2)",
            delta108.abs()
        ),
    )
}

fn criterion_6() -> Outcome {
    let grid = TimeGrid::new(vec![50.0]).unwrap();
    let runs: Vec<(usize, f64, f64)> = [2, 5, 10]
        .iter()
        .map(|&m| {
            let s = trap_ensemble(CycleSpec::new(100, m).unwrap(), 5, 1.0, 20, 7, &grid).unwrap();
            (m, s.quantum_mean[0], s.classical_mean[0])
        })
        .collect();
    let ordered = |pick: fn(&(usize, f64, f64)) -> f64| runs.windows(2).all(|w| pick(&w[1]) < pick(&w[0]));
    let pass = ordered(|r| r.1) && ordered(|r| r.2);
    let detail = runs
        .iter()
        .map(|(m, q, c)| format!("m={m}: Π {q:.4}, P {c:.4}"))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(pass, format!("t=50 ensemble means {detail} (decreasing in m)"))
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let n = rng.random_range(5..=400);
        let m = rng.random_range(2..=CycleSpec::max_range(n));
        let Ok(spec) = CycleSpec::new(n, m) else { continue };
        let t = rng.random_range(0.0..500.0);
        let s = full_spectrum(spec);
        let grid = TimeGrid::new(vec![t]).unwrap();
        for kind in [Kind::Classical, Kind::Quantum] {
            let total: f64 = propagator_field(&s, kind, &grid).at(0).iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                failures.push(format!("{kind} norm {total} on {spec} at t={t}"));
            }
        }
        let e = s.energies();
        let trace: f64 = e.iter().sum();
        if e.iter().any(|v| !(0.0..=8.0).contains(v)) || (trace - 4.0 * n as f64).abs() > 1e-8 * n as f64 {
            failures.push(format!("spectral bounds or trace on {spec}"));
        }
    }

    let grid = TimeGrid::new(vec![0.1, 1.0, 10.0]).unwrap();
    for n in 5..=12 {
        for m in 2..=CycleSpec::max_range(n) {
            let Ok(spec) = CycleSpec::new(n, m) else { continue };
            let h = build_hamiltonian(spec).into_matrix();
            let s = full_spectrum(spec);
            let classical = propagator_field(&s, Kind::Classical, &grid);
            let quantum = propagator_field(&s, Kind::Quantum, &grid);
            for (i, &t) in grid.times().iter().enumerate() {
                let c = common::taylor_expm(&h.mapv(|v| -t * v));
                let q = common::taylor_expm_complex(&h.mapv(|v| Complex64::new(0.0, -t * v)));
                for j in 1..=n {
                    for k in 1..=n {
                        let dc = (classical.probability(i, j, k).unwrap() - c[[k - 1, j - 1]]).abs();
                        let dq = (quantum.probability(i, j, k).unwrap() - q[[k - 1, j - 1]].norm_sqr()).abs();
                        if dc > 1e-8 || dq > 1e-8 {
                            failures.push(format!("propagator mismatch on {spec} at t={t}"));
                        }
                    }
                }
            }
        }
    }

    for m in 2..=200 {
        match stationary_points(m) {
            Ok(points) => {
                let d = DispersionFn::new(m);
                let minima = points.iter().filter(|p| p.kind == Extremum::Minimum).count();
                if points.len() != 2 * m || minima != m || points.iter().any(|p| d.slope(p.theta).abs() >= 1e-10) {
                    failures.push(format!("stationary points for m={m}"));
                }
            }
            Err(e) => failures.push(format!("stationary points for m={m}: {e}")),
        }
    }

    for n in 5..=8 {
        for m in 2..=CycleSpec::max_range(n) {
            let Ok(spec) = CycleSpec::new(n, m) else { continue };
            let (values, vectors) = common::symmetric_eigen(build_hamiltonian(spec).matrix());
            let samples = 100_000;
            let mut average = vec![0.0; n];
            for step in 0..samples {
                let u = common::eigen_unitary(&values, &vectors, 1e4 * step as f64 / samples as f64);
                for k in 0..n {
                    average[k] += u[[k, 0]].norm_sqr() / samples as f64;
                }
            }
            let chi = limiting_distribution(&full_spectrum(spec), 1).unwrap();
            for k in 1..=n {
                if (chi.at_node(k).unwrap() - average[k - 1]).abs() >= 2e-3 {
                    failures.push(format!("χ vs time average on {spec} at k={k}"));
                }
            }
        }
    }

    failures.dedup();
    let detail = if failures.is_empty() {
        "conservation, spectral bounds, N ≤ 12 exponential oracles, stationary points m=2..200, χ vs time average".to_string()
    } else {
        failures.join("; ")
    };
    Outcome::new(failures.is_empty(), detail)
}

fn criterion_8() -> Outcome {
    let times = [10.0, 50.0, 100.0];
    let grid = TimeGrid::new(times.to_vec()).unwrap();
    let mut worst = [(0.0f64, Kind::Classical), (0.0f64, Kind::Quantum)];
    for m in [2, 10] {
        let s = spectrum(RING, m);
        for (slot, kind) in [Kind::Classical, Kind::Quantum].into_iter().enumerate() {
            let exact = return_probability(&s, kind, &grid);
            for (&t, &e) in times.iter().zip(&exact) {
                let c = continuum_return_at(kind, m, t).unwrap();
                worst[slot].0 = worst[slot].0.max((c / e - 1.0).abs());
            }
        }
    }
    let pass = worst[0].0 < 1e-3 && worst[1].0 < 1e-2;
    Outcome::new(
        pass,
        format!(
            "max rel. difference classical {:.2e} (< 1e-3), quantum {:.2e} (< 1e-2)",
            worst[0].0, worst[1].0
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("classical small-m scaling", criterion_1),
        ("classical large-m scaling", criterion_2),
        ("quantum small-m scaling", criterion_3),
        ("quantum large-m scaling", criterion_4),
        ("limiting-distribution symmetry and asymmetry", criterion_5),
        ("trapping survival ordering", criterion_6),
        ("property and oracle suite", criterion_7),
        ("continuum consistency", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {} ({name}): {} [{:.1}s]",
            i + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        for note in &outcome.notes {
            println!("     note: {note}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
