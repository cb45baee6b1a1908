use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use lric_core::asymptotics::{classical_spa, quantum_spa, stationary_points};
use lric_core::lattice::build_hamiltonian;
use lric_core::spectral::{full_spectrum, DispersionFn};
use lric_core::transport::{
    self, continuum_return, fit_power_law, limiting_distribution, propagator_field, return_probability,
    Binning, Kind, TimeGrid,
};
use lric_core::trapping::{single_survival, trap_ensemble, SurvivalSeries, TrapConfig};
use lric_core::CycleSpec;
use serde::Serialize;
use serde_json::json;

use crate::output::{write_json_file, Cell, RunManifest, Sink, Table};
use crate::{
    AsymmetryScanArgs, DispersionArgs, DistributionArgs, FitArgs, LimitingArgs, ReturnArgs, SpaArgs,
    SpaPointsArgs, SpecArgs, Spacing, TrapArgs,
};

pub fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

pub fn cycle(spec: &SpecArgs) -> Result<CycleSpec> {
    Ok(CycleSpec::new(spec.n, spec.m)?)
}

pub fn spectrum_table(spec: CycleSpec) -> Table {
    let s = full_spectrum(spec);
    let mut table = Table::new(&["n", "theta", "energy", "class_id"]);
    for mode in 1..=spec.n() {
        table.push(vec![
            mode.into(),
            s.phases()[mode - 1].into(),
            s.energy(mode).into(),
            s.class_id(mode).into(),
        ]);
    }
    table
}

pub fn spectrum(args: &SpecArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let table = spectrum_table(cycle(args)?);
    sink.emit("spectrum", &table, &RunManifest::new("spectrum", argv, params(args), None))?;
    Ok(())
}

pub fn dispersion_table(m: usize, samples: usize) -> Result<Table> {
    if m < 2 {
        bail!("m must be at least 2, got {m}");
    }
    if samples == 0 {
        bail!("--samples must be positive");
    }
    let mut table = Table::new(&["theta", "energy"]);
    for (theta, energy) in DispersionFn::new(m).sample(samples) {
        table.push(vec![theta.into(), energy.into()]);
    }
    Ok(table)
}

pub fn dispersion(args: &DispersionArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let table = dispersion_table(args.m, args.samples)?;
    sink.emit("dispersion", &table, &RunManifest::new("dispersion", argv, params(args), None))?;
    Ok(())
}

/// `t` plus one column per requested kind (`p` classical, `pi` quantum).
pub fn return_table(times: &[f64], kinds: &[Kind], series: &[Vec<f64>]) -> Table {
    let mut columns = vec!["t"];
    for kind in kinds {
        columns.push(match kind {
            Kind::Classical => "p",
            Kind::Quantum => "pi",
        });
    }
    let mut table = Table::new(&columns);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![Cell::from(t)];
        row.extend(series.iter().map(|s| Cell::from(s[i].clamp(0.0, 1.0))));
        table.push(row);
    }
    table
}

pub fn return_command(args: &ReturnArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let grid = TimeGrid::log_spaced(args.tmin, args.tmax, args.ppd)?;
    let kinds = args.kind.kinds();
    let series = if args.continuum {
        kinds
            .iter()
            .map(|&k| continuum_return(k, args.m, &grid))
            .collect::<lric_core::Result<Vec<_>>>()?
    } else {
        let n = args.n.context("--n is required for a finite ring")?;
        let s = full_spectrum(CycleSpec::new(n, args.m)?);
        kinds.iter().map(|&k| return_probability(&s, k, &grid)).collect()
    };
    let table = return_table(grid.times(), &kinds, &series);
    sink.emit("return", &table, &RunManifest::new("return", argv, params(args), None))?;
    Ok(())
}

pub fn distribution(args: &DistributionArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let spec = cycle(&args.spec)?;
    if args.j == 0 || args.j > spec.n() {
        bail!("start node {} out of range 1..={}", args.j, spec.n());
    }
    let s = full_spectrum(spec);
    let grid = TimeGrid::new(vec![args.t])?;
    let classical = propagator_field(&s, Kind::Classical, &grid);
    let quantum = propagator_field(&s, Kind::Quantum, &grid);
    let mut table = Table::new(&["k", "p_kj", "pi_kj"]);
    for k in 1..=spec.n() {
        table.push(vec![
            k.into(),
            classical.probability(0, args.j, k)?.clamp(0.0, 1.0).into(),
            quantum.probability(0, args.j, k)?.clamp(0.0, 1.0).into(),
        ]);
    }
    sink.emit("distribution", &table, &RunManifest::new("distribution", argv, params(args), None))?;
    Ok(())
}

pub fn limiting_table(spec: CycleSpec, j: usize) -> Result<Table> {
    let chi = limiting_distribution(&full_spectrum(spec), j)?;
    let mut table = Table::new(&["k", "chi"]);
    for (k, value) in chi.by_node() {
        table.push(vec![k.into(), value.into()]);
    }
    Ok(table)
}

pub fn limiting(args: &LimitingArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let table = limiting_table(cycle(&args.spec)?, args.j)?;
    sink.emit("limiting", &table, &RunManifest::new("limiting", argv, params(args), None))?;
    Ok(())
}

pub fn asymmetry_table(rows: &[transport::Asymmetry]) -> Table {
    let mut table = Table::new(&["N", "chi_11", "chi_opp", "delta"]);
    for r in rows {
        table.push(vec![r.n.into(), r.chi_start.into(), r.chi_opposite.into(), r.delta.into()]);
    }
    table
}

pub fn asymmetry_scan(args: &AsymmetryScanArgs, argv: &[String], sink: &Sink) -> Result<()> {
    if args.nmin > args.nmax {
        bail!("--nmin {} exceeds --nmax {}", args.nmin, args.nmax);
    }
    let rows = transport::asymmetry_scan(args.m, args.nmin, args.nmax)?;
    let table = asymmetry_table(&rows);
    sink.emit("asymmetry_scan", &table, &RunManifest::new("asymmetry-scan", argv, params(args), None))?;
    Ok(())
}

pub fn spa(args: &SpaArgs, argv: &[String], sink: &Sink) -> Result<()> {
    if args.tmin <= 0.0 {
        bail!("stationary-phase estimates need --tmin > 0, got {}", args.tmin);
    }
    let grid = TimeGrid::log_spaced(args.tmin, args.tmax, args.ppd)?;
    let mut table = Table::new(&["t", "value"]);
    for &t in grid.times() {
        let value = match args.kind {
            Kind::Classical => classical_spa(args.m, t, args.regime)?,
            Kind::Quantum => quantum_spa(args.m, t, args.regime)?,
        };
        table.push(vec![t.into(), value.into()]);
    }
    sink.emit("spa", &table, &RunManifest::new("spa", argv, params(args), None))?;
    Ok(())
}

pub fn spa_points_table(m: usize) -> Result<Table> {
    let mut table = Table::new(&["theta", "kind", "energy", "curvature"]);
    for p in stationary_points(m)? {
        table.push(vec![p.theta.into(), p.kind.to_string().as_str().into(), p.energy.into(), p.curvature.into()]);
    }
    Ok(table)
}

pub fn spa_points(args: &SpaPointsArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let table = spa_points_table(args.m)?;
    sink.emit("spa_points", &table, &RunManifest::new("spa-points", argv, params(args), None))?;
    Ok(())
}

pub fn trap_grid(spacing: Spacing, tmin: f64, tmax: f64, points: usize, ppd: usize) -> Result<TimeGrid> {
    Ok(match spacing {
        Spacing::Linear => TimeGrid::linear(tmin, tmax, points)?,
        Spacing::Log => TimeGrid::log_spaced(tmin, tmax, ppd)?,
    })
}

pub fn survival_table(series: &SurvivalSeries) -> Table {
    let mut table = Table::new(&["t", "Pi_mean", "Pi_std", "P_mean", "P_std"]);
    for i in 0..series.times.len() {
        table.push(vec![
            series.times[i].into(),
            series.quantum_mean[i].into(),
            series.quantum_std[i].into(),
            series.classical_mean[i].into(),
            series.classical_std[i].into(),
        ]);
    }
    table
}

pub fn trap(args: &TrapArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let spec = cycle(&args.spec)?;
    let grid = trap_grid(args.spacing, args.tmin, args.tmax, args.points, args.ppd)?;
    let (series, seed) = match &args.trap_nodes {
        Some(nodes) => {
            let config = TrapConfig::new(spec, nodes.clone(), args.gamma)?;
            (single_survival(&config, &grid), None)
        }
        None => (
            trap_ensemble(spec, args.traps, args.gamma, args.realizations, args.seed, &grid)?,
            Some(args.seed),
        ),
    };
    let table = survival_table(&series);
    sink.emit("trap", &table, &RunManifest::new("trap", argv, params(args), seed))?;
    Ok(())
}

/// Reads the first column and a named column of a CSV written by this tool.
pub fn read_series(path: &std::path::Path, column: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let index = headers
        .iter()
        .position(|h| h == column)
        .with_context(|| format!("column '{column}' not found in {}", path.display()))?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            record
                .get(i)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .with_context(|| format!("row {}: cannot parse column {i} as a number", line + 1))
        };
        times.push(parse(0)?);
        values.push(parse(index)?);
    }
    Ok((times, values))
}

pub fn fit(args: &FitArgs, sink: &Sink) -> Result<()> {
    let (times, values) = read_series(&args.input, &args.column)?;
    let binning = if args.log_bins {
        Binning::LogBins { per_decade: args.bins_per_decade }
    } else {
        Binning::None
    };
    let result = fit_power_law(&times, &values, (args.tmin, args.tmax), binning)?;
    let doc = json!({
        "slope": result.slope,
        "intercept": result.intercept,
        "rms": result.rms,
        "tmin": result.tmin,
        "tmax": result.tmax,
        "points": result.points,
        "binning": result.binning,
        "column": args.column,
        "input": args.input,
    });
    match sink.dir() {
        Some(dir) => write_json_file(&dir.join("fit.json"), &doc)?,
        None => println!("{}", serde_json::to_string_pretty(&doc)?),
    }
    Ok(())
}

pub fn hamiltonian(args: &SpecArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let h = build_hamiltonian(cycle(args)?);
    let manifest = RunManifest::new("hamiltonian", argv, params(args), None);
    let write = |out: &mut dyn Write| -> Result<()> {
        manifest.write_header(&mut *out)?;
        h.write_csv(&mut *out)?;
        Ok(())
    };
    match sink.dir() {
        Some(dir) => {
            let path = dir.join("hamiltonian.csv");
            let mut file = io::BufWriter::new(
                std::fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?,
            );
            write(&mut file)?;
            file.flush()?;
        }
        None => write(&mut io::stdout().lock())?,
    }
    Ok(())
}
