//! CSV bundles for the standard figure set, one directory per figure with a
//! `manifest.json` listing its panels.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use lric_core::asymptotics::{
    classical_spa_sum, quantum_spa_large_m, quantum_spa_m2, spa_generic, stationary_points, theta_envelope,
    Extremum, SpaScale, SqrtBranch,
};
use lric_core::spectral::full_spectrum;
use lric_core::transport::{asymmetry_scan, return_probability, Kind, TimeGrid};
use lric_core::trapping::trap_ensemble;
use lric_core::CycleSpec;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{
    asymmetry_table, dispersion_table, limiting_table, params, return_table, spa_points_table, survival_table,
};
use crate::output::{write_json_file, write_table_file, Cell, Format, RunManifest, Sink, Table, SCHEMA_VERSION};

pub const FIGURES: [u8; 6] = [2, 3, 4, 5, 6, 7];

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigureArgs {
    /// Figure id (2-7) or "all"
    #[arg(long, default_value = "all")]
    pub figure: String,
    /// Trap realizations for figure 7
    #[arg(long, default_value_t = lric_core::trapping::DEFAULT_REALIZATIONS)]
    pub realizations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Ring size for the return-probability panels
    #[arg(long, default_value_t = 10_000)]
    pub ring: usize,
}

fn selected(figure: &str) -> Result<Vec<u8>> {
    if figure == "all" {
        return Ok(FIGURES.to_vec());
    }
    let id: u8 = figure.parse().with_context(|| format!("unknown figure '{figure}'"))?;
    if !FIGURES.contains(&id) {
        bail!("figure {id} has no data bundle; choose one of 2-7 or all");
    }
    Ok(vec![id])
}

struct Bundle<'a> {
    dir: std::path::PathBuf,
    manifest: &'a RunManifest,
    format: Format,
    files: Vec<Value>,
}

impl Bundle<'_> {
    fn add(&mut self, stem: &str, panel: &str, table: &Table) -> Result<()> {
        let name = format!("{stem}.{}", self.format.extension());
        write_table_file(&self.dir.join(&name), table, self.manifest, self.format)?;
        self.files.push(json!({ "file": name, "panel": panel, "columns": table.columns, "rows": table.rows.len() }));
        Ok(())
    }
}

fn figure2(b: &mut Bundle) -> Result<Value> {
    for m in [2, 10] {
        b.add(&format!("dispersion_m{m}"), &format!("E_m(theta), m={m}"), &dispersion_table(m, 1000)?)?;
        b.add(&format!("stationary_m{m}"), &format!("stationary points, m={m}"), &spa_points_table(m)?)?;
    }
    let mut envelope = Table::new(&["theta", "e_min", "e_max"]);
    for k in 0..1000 {
        let theta = std::f64::consts::TAU * k as f64 / 1000.0;
        envelope.push(vec![
            theta.into(),
            theta_envelope(Extremum::Minimum, theta).into(),
            theta_envelope(Extremum::Maximum, theta).into(),
        ]);
    }
    b.add("envelope", "E^min and E^max", &envelope)?;
    Ok(json!({ "m": [2, 10], "samples": 1000 }))
}

fn figure3(b: &mut Bundle, ring: usize) -> Result<Value> {
    let grid = TimeGrid::default_log();
    for m in [2, 10, 100] {
        let s = full_spectrum(CycleSpec::new(ring, m)?);
        let kinds = [Kind::Classical, Kind::Quantum];
        let series: Vec<Vec<f64>> = kinds.iter().map(|&k| return_probability(&s, k, &grid)).collect();
        b.add(&format!("return_m{m}"), &format!("exact p and pi, N={ring}, m={m}"), &return_table(grid.times(), &kinds, &series))?;

        let points = stationary_points(m)?;
        let mut spa = Table::new(&["t", "p_spa", "pi_spa", "pi_closed"]);
        for &t in grid.times() {
            let p = classical_spa_sum(&points, t)?;
            let pi = spa_generic(&points, SpaScale::Imaginary, t, SqrtBranch::Principal)?.norm_sqr();
            let closed = match m {
                2 => Cell::from(quantum_spa_m2(t)?),
                100 => Cell::from(quantum_spa_large_m(t)?),
                _ => Cell::Empty,
            };
            spa.push(vec![t.into(), p.into(), pi.into(), closed]);
        }
        b.add(&format!("spa_m{m}"), &format!("stationary-phase estimates, m={m}"), &spa)?;
    }
    Ok(json!({ "N": ring, "m": [2, 10, 100], "tmin": 0.1, "tmax": 1e4, "ppd": 100 }))
}

fn limiting_figure(b: &mut Bundle, n: usize) -> Result<Value> {
    let ms: Vec<usize> = (2..=10).collect();
    for &m in &ms {
        b.add(&format!("limiting_N{n}_m{m}"), &format!("chi_k1, N={n}, m={m}"), &limiting_table(CycleSpec::new(n, m)?, 1)?)?;
    }
    Ok(json!({ "N": n, "m": ms, "j": 1 }))
}

fn figure6(b: &mut Bundle) -> Result<Value> {
    for m in [2, 3, 4] {
        b.add(&format!("asymmetry_m{m}"), &format!("Delta(1, N/2), m={m}"), &asymmetry_table(&asymmetry_scan(m, 20, 500)?))?;
    }
    Ok(json!({ "m": [2, 3, 4], "nmin": 20, "nmax": 500 }))
}

fn figure7(b: &mut Bundle, realizations: usize, seed: u64) -> Result<Value> {
    let grid = TimeGrid::linear(0.0, 100.0, 101)?;
    for m in [2, 5, 10] {
        let series = trap_ensemble(CycleSpec::new(100, m)?, 5, 1.0, realizations, seed, &grid)?;
        b.add(&format!("survival_m{m}"), &format!("Pi_M and P_M, N=100, m={m}"), &survival_table(&series))?;
    }
    Ok(json!({ "N": 100, "m": [2, 5, 10], "traps": 5, "gamma": 1.0, "realizations": realizations, "seed": seed }))
}

fn emit(id: u8, root: &Path, args: &FigureArgs, argv: &[String], format: Format) -> Result<()> {
    let seed = (id == 7).then_some(args.seed);
    let manifest = RunManifest::new("figure-data", argv, params(args), seed);
    let mut bundle = Bundle { dir: root.join(format!("fig{id}")), manifest: &manifest, format, files: Vec::new() };
    let figure_params = match id {
        2 => figure2(&mut bundle)?,
        3 => figure3(&mut bundle, args.ring)?,
        4 => limiting_figure(&mut bundle, 100)?,
        5 => limiting_figure(&mut bundle, 75)?,
        6 => figure6(&mut bundle)?,
        7 => figure7(&mut bundle, args.realizations, args.seed)?,
        _ => unreachable!("figure ids are validated"),
    };
    let doc = json!({
        "figure": id,
        "schema": SCHEMA_VERSION,
        "tool": manifest.tool,
        "version": manifest.version,
        "timestamp": manifest.timestamp,
        "seed": seed,
        "params": figure_params,
        "files": bundle.files,
    });
    write_json_file(&bundle.dir.join("manifest.json"), &doc)
}

pub fn run(args: &FigureArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let ids = selected(&args.figure)?;
    let root = sink.dir().unwrap_or(Path::new("figure-data")).to_path_buf();
    for id in ids {
        emit(id, &root, args, argv, sink.format()).with_context(|| format!("figure {id}"))?;
    }
    Ok(())
}
