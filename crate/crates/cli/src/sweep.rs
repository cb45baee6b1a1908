//! One task over many `(N, m)`. A failing spec is recorded in the summary
//! and the sweep moves on.

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use lric_core::spectral::full_spectrum;
use lric_core::transport::{
    asymmetry, fit_power_law, limiting_distribution, return_probability, Binning, Kind, TimeGrid,
};
use lric_core::trapping::trap_ensemble;
use lric_core::CycleSpec;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::commands::{asymmetry_table, limiting_table, params, return_table, survival_table, trap_grid};
use crate::output::{write_json_file, write_table_file, RunManifest, Sink, Table};
use crate::{KindChoice, Spacing};

/// Asymmetries smaller than this count as zero in the summary.
const DELTA_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Return,
    Limiting,
    Asymmetry,
    Trap,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    /// Explicit specs as N:m pairs, e.g. 100:2,100:5
    #[arg(long, value_delimiter = ',')]
    pub specs: Vec<String>,
    /// Long-range distances for a size range
    #[arg(long, value_delimiter = ',')]
    pub m_values: Vec<usize>,
    #[arg(long, requires = "nmax")]
    pub nmin: Option<usize>,
    #[arg(long, requires = "nmin")]
    pub nmax: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub nstep: usize,
    #[arg(long, value_enum, default_value_t = KindChoice::Both)]
    pub kind: KindChoice,
    /// Start of the time grid (default 0.1 for return, 0 for trap)
    #[arg(long)]
    pub tmin: Option<f64>,
    /// End of the time grid (default 1e4 for return, 100 for trap)
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub ppd: usize,
    /// Fit window for the return-probability exponents
    #[arg(long, default_value_t = 10.0)]
    pub fit_tmin: f64,
    #[arg(long, default_value_t = 1e3)]
    pub fit_tmax: f64,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, default_value_t = 5)]
    pub traps: usize,
    #[arg(long, default_value_t = lric_core::trapping::DEFAULT_STRENGTH)]
    pub gamma: f64,
    #[arg(long, default_value_t = lric_core::trapping::DEFAULT_REALIZATIONS)]
    pub realizations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

/// Validated sweep: every spec is a valid graph and every grid is built.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPlan {
    pub task: Task,
    pub specs: Vec<(usize, usize)>,
    #[serde(skip)]
    pub grid: Option<TimeGrid>,
    pub settings: SweepArgs,
}

fn parse_pair(text: &str) -> Result<(usize, usize)> {
    let (n, m) = text
        .split_once(':')
        .with_context(|| format!("spec '{text}' is not of the form N:m"))?;
    let n = n.trim().parse().with_context(|| format!("bad N in spec '{text}'"))?;
    let m = m.trim().parse().with_context(|| format!("bad m in spec '{text}'"))?;
    Ok((n, m))
}

impl SweepPlan {
    pub fn from_args(args: &SweepArgs) -> Result<Self> {
        let mut specs = Vec::new();
        for text in &args.specs {
            let (n, m) = parse_pair(text)?;
            CycleSpec::new(n, m).with_context(|| format!("spec {text}"))?;
            specs.push((n, m));
        }
        if let (Some(nmin), Some(nmax)) = (args.nmin, args.nmax) {
            if args.m_values.is_empty() {
                bail!("--nmin/--nmax need --m-values");
            }
            if args.nstep == 0 || nmin > nmax {
                bail!("empty size range {nmin}..={nmax} with step {}", args.nstep);
            }
            for &m in &args.m_values {
                // sizes where G(N, m) does not exist are skipped
                for n in (nmin..=nmax).step_by(args.nstep) {
                    if CycleSpec::new(n, m).is_ok() {
                        specs.push((n, m));
                    }
                }
            }
        } else if !args.m_values.is_empty() {
            bail!("--m-values needs --nmin and --nmax");
        }
        if specs.is_empty() {
            bail!("the sweep has no specs; use --specs or --m-values with --nmin/--nmax");
        }
        let grid = match args.task {
            Task::Return => Some(TimeGrid::log_spaced(
                args.tmin.unwrap_or(0.1),
                args.tmax.unwrap_or(1e4),
                args.ppd,
            )?),
            Task::Trap => {
                let spacing = if args.tmin.unwrap_or(0.0) > 0.0 { Spacing::Log } else { Spacing::Linear };
                let (tmin, tmax) = (args.tmin.unwrap_or(0.0), args.tmax.unwrap_or(100.0));
                Some(trap_grid(spacing, tmin, tmax, args.points, args.ppd)?)
            }
            Task::Limiting | Task::Asymmetry => None,
        };
        if args.task == Task::Trap && args.traps == 0 {
            bail!("--traps must be positive");
        }
        Ok(Self { task: args.task, specs, grid, settings: args.clone() })
    }
}

fn fit_slope(times: &[f64], values: &[f64], window: (f64, f64), binning: Binning) -> Value {
    match fit_power_law(times, values, window, binning) {
        Ok(f) => json!(f.slope),
        Err(_) => Value::Null,
    }
}

/// Value at the grid point nearest to `target`.
fn nearest(times: &[f64], values: &[f64], target: f64) -> (f64, f64) {
    let i = times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map_or(0, |(i, _)| i);
    (times[i], values[i])
}

fn run_spec(plan: &SweepPlan, spec: CycleSpec) -> Result<(Table, Map<String, Value>)> {
    let args = &plan.settings;
    let mut scalars = Map::new();
    let table = match plan.task {
        Task::Return => {
            let grid = plan.grid.as_ref().expect("return sweeps carry a grid");
            let s = full_spectrum(spec);
            let kinds = args.kind.kinds();
            let series: Vec<Vec<f64>> = kinds.iter().map(|&k| return_probability(&s, k, grid)).collect();
            let window = (args.fit_tmin, args.fit_tmax);
            for (kind, values) in kinds.iter().zip(&series) {
                let (key, binning) = match kind {
                    Kind::Classical => ("classical_slope", Binning::None),
                    Kind::Quantum => ("quantum_slope", Binning::log_bins()),
                };
                scalars.insert(key.into(), fit_slope(grid.times(), values, window, binning));
            }
            return_table(grid.times(), &kinds, &series)
        }
        Task::Limiting => {
            let s = full_spectrum(spec);
            let chi = limiting_distribution(&s, args.j)?;
            scalars.insert("chi_start".into(), json!(chi.at_node(args.j)?));
            if spec.n().is_multiple_of(2) {
                let a = asymmetry(&s)?;
                scalars.insert("delta".into(), json!(a.delta));
            }
            limiting_table(spec, args.j)?
        }
        Task::Asymmetry => {
            let a = asymmetry(&full_spectrum(spec))?;
            scalars.insert("chi_11".into(), json!(a.chi_start));
            scalars.insert("chi_opp".into(), json!(a.chi_opposite));
            scalars.insert("delta".into(), json!(a.delta));
            asymmetry_table(&[a])
        }
        Task::Trap => {
            let grid = plan.grid.as_ref().expect("trap sweeps carry a grid");
            let series = trap_ensemble(spec, args.traps, args.gamma, args.realizations, args.seed, grid)?;
            let mut landmarks = Vec::new();
            for target in [10.0, 50.0, 100.0] {
                let (t, pi) = nearest(&series.times, &series.quantum_mean, target);
                let (_, p) = nearest(&series.times, &series.classical_mean, target);
                landmarks.push(json!({ "t": t, "Pi_mean": pi, "P_mean": p }));
            }
            scalars.insert("survival".into(), Value::Array(landmarks));
            survival_table(&series)
        }
    };
    Ok((table, scalars))
}

pub fn run(args: &SweepArgs, argv: &[String], sink: &Sink) -> Result<()> {
    let plan = SweepPlan::from_args(args)?;
    let dir = sink.dir().context("sweep needs --output <dir>")?.to_path_buf();
    let seed = (plan.task == Task::Trap).then_some(args.seed);
    let manifest = RunManifest::new("sweep", argv, params(args), seed);
    let task_name = serde_json::to_value(plan.task)?.as_str().unwrap_or("task").to_string();

    let mut results = Vec::new();
    let mut nonzero = Vec::new();
    let mut failures = 0;
    for &(n, m) in &plan.specs {
        let spec = CycleSpec::new(n, m)?;
        let file = format!("{task_name}_N{n}_m{m}.{}", sink.format().extension());
        let outcome = run_spec(&plan, spec)
            .and_then(|(table, scalars)| write_table_file(&dir.join(&file), &table, &manifest, sink.format()).map(|_| scalars));
        match outcome {
            Ok(scalars) => {
                if let Some(delta) = scalars.get("delta").and_then(Value::as_f64) {
                    if delta.abs() > DELTA_FLOOR {
                        nonzero.push(json!({ "n": n, "m": m, "delta": delta }));
                    }
                }
                results.push(json!({ "n": n, "m": m, "status": "ok", "file": file, "scalars": scalars }));
            }
            Err(e) => {
                failures += 1;
                results.push(json!({ "n": n, "m": m, "status": "error", "error": format!("{e:#}") }));
            }
        }
    }

    let mut summary = json!({
        "manifest": manifest,
        "plan": plan,
        "results": results,
        "failures": failures,
    });
    if matches!(plan.task, Task::Asymmetry | Task::Limiting) {
        summary["nonzero_delta"] = Value::Array(nonzero);
    }
    write_json_file(&dir.join("summary.json"), &summary)?;
    if failures > 0 {
        eprintln!("warning: {failures} of {} specs failed; see summary.json", plan.specs.len());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrapper {
        #[command(flatten)]
        args: SweepArgs,
    }

    fn plan(line: &str) -> Result<SweepPlan> {
        let argv = std::iter::once("sweep").chain(line.split_whitespace());
        SweepPlan::from_args(&Wrapper::try_parse_from(argv).unwrap().args)
    }

    #[test]
    fn ranges_skip_sizes_without_a_graph() {
        let p = plan("--task asymmetry --m-values 4 --nmin 6 --nmax 12 --nstep 2").unwrap();
        assert_eq!(p.specs, vec![(10, 4), (12, 4)]);
    }

    #[test]
    fn explicit_specs_are_validated_up_front() {
        assert!(plan("--task limiting --specs 10:5").is_err());
        assert!(plan("--task limiting --specs 10-2").is_err());
        let p = plan("--task limiting --specs 10:2,11:3").unwrap();
        assert_eq!(p.specs, vec![(10, 2), (11, 3)]);
    }

    #[test]
    fn empty_plans_are_rejected() {
        assert!(plan("--task return").is_err());
        assert!(plan("--task return --m-values 2").is_err());
    }

    #[test]
    fn nearest_landmark() {
        let t = [0.0, 5.0, 10.0, 15.0];
        let v = [1.0, 0.5, 0.25, 0.125];
        assert_eq!(nearest(&t, &v, 11.0), (10.0, 0.25));
    }
}
