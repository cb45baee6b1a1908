use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lric_core::asymptotics::Regime;
use lric_core::transport::Kind;
use serde::Serialize;

mod commands;
mod config;
mod figures;
mod output;
mod sweep;

use output::{Format, Sink};

/// Quantum and classical transport on long-range interacting cycles G(N, m).
#[derive(Debug, Parser)]
#[command(name = "lric", version, about)]
struct Cli {
    /// Directory for output files (stdout when omitted, where possible)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "LRIC_THREADS")]
    threads: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// JSON file whose keys mirror long flags; flags on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct SpecArgs {
    /// Number of nodes N
    #[arg(long)]
    pub n: usize,
    /// Long-range bond distance m
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindChoice {
    Classical,
    Quantum,
    Both,
}

impl KindChoice {
    pub fn kinds(self) -> Vec<Kind> {
        match self {
            KindChoice::Classical => vec![Kind::Classical],
            KindChoice::Quantum => vec![Kind::Quantum],
            KindChoice::Both => vec![Kind::Classical, Kind::Quantum],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DispersionArgs {
    #[arg(long)]
    pub m: usize,
    /// Uniform samples on [0, 2π)
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReturnArgs {
    /// Number of nodes (not needed with --continuum)
    #[arg(long, required_unless_present = "continuum")]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = KindChoice::Both)]
    pub kind: KindChoice,
    #[arg(long, default_value_t = 0.1)]
    pub tmin: f64,
    #[arg(long, default_value_t = 1e4)]
    pub tmax: f64,
    /// Grid points per decade
    #[arg(long, default_value_t = 100)]
    pub ppd: usize,
    /// Evaluate the infinite-ring integrals instead of the finite ring
    #[arg(long)]
    pub continuum: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DistributionArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub t: f64,
    /// Start node (1-based)
    #[arg(long, default_value_t = 1)]
    pub j: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LimitingArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 1)]
    pub j: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AsymmetryScanArgs {
    #[arg(long)]
    pub m: usize,
    /// Smallest ring size (even)
    #[arg(long)]
    pub nmin: usize,
    /// Largest ring size (even)
    #[arg(long)]
    pub nmax: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value = "classical")]
    pub kind: Kind,
    #[arg(long, default_value = "auto")]
    pub regime: Regime,
    #[arg(long, default_value_t = 1.0)]
    pub tmin: f64,
    #[arg(long, default_value_t = 1e4)]
    pub tmax: f64,
    #[arg(long, default_value_t = 100)]
    pub ppd: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaPointsArgs {
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrapArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Number of randomly placed traps
    #[arg(long, default_value_t = 5)]
    pub traps: usize,
    /// Explicit trap nodes, overriding random placement
    #[arg(long, value_delimiter = ',')]
    pub trap_nodes: Option<Vec<usize>>,
    /// Trap strength Γ
    #[arg(long, default_value_t = lric_core::trapping::DEFAULT_STRENGTH)]
    pub gamma: f64,
    #[arg(long, default_value_t = lric_core::trapping::DEFAULT_REALIZATIONS)]
    pub realizations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    pub spacing: Spacing,
    /// Grid points (linear spacing)
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Grid points per decade (log spacing)
    #[arg(long, default_value_t = 20)]
    pub ppd: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// CSV produced by this tool
    #[arg(long)]
    pub input: PathBuf,
    /// Column to fit against the first (time) column
    #[arg(long)]
    pub column: String,
    #[arg(long)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    /// Average inside logarithmic bins before fitting
    #[arg(long)]
    pub log_bins: bool,
    #[arg(long, default_value_t = lric_core::transport::DEFAULT_BINS_PER_DECADE)]
    pub bins_per_decade: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bloch energies and degeneracy classes
    Spectrum(SpecArgs),
    /// Dispersion E_m(θ) on a uniform θ grid
    Dispersion(DispersionArgs),
    /// Return probabilities p(t) and π(t)
    Return(ReturnArgs),
    /// Transition probabilities from node j at one time
    Distribution(DistributionArgs),
    /// Long-time averaged quantum distribution χ_{k,j}
    Limiting(LimitingArgs),
    /// Antipodal asymmetry Δ(1, N/2) over even ring sizes
    AsymmetryScan(AsymmetryScanArgs),
    /// Stationary-phase estimates of the return probability
    Spa(SpaArgs),
    /// Stationary points of the dispersion
    SpaPoints(SpaPointsArgs),
    /// Survival probabilities with absorbing traps
    Trap(TrapArgs),
    /// Power-law fit of one CSV column against time
    Fit(FitArgs),
    /// Dense Hamiltonian as an integer matrix
    Hamiltonian(SpecArgs),
    /// Run one task over many (N, m)
    Sweep(sweep::SweepArgs),
    /// Data bundles for the standard figure set
    FigureData(figures::FigureArgs),
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(k) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    Ok(())
}

fn run(cli: Cli, argv: &[String]) -> Result<()> {
    configure_threads(cli.threads)?;
    let sink = Sink::new(cli.output.clone(), cli.format);
    if let Some(dir) = sink.dir() {
        output::ensure_dir(dir)?;
    }
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, argv, &sink),
        Command::Dispersion(a) => commands::dispersion(a, argv, &sink),
        Command::Return(a) => commands::return_command(a, argv, &sink),
        Command::Distribution(a) => commands::distribution(a, argv, &sink),
        Command::Limiting(a) => commands::limiting(a, argv, &sink),
        Command::AsymmetryScan(a) => commands::asymmetry_scan(a, argv, &sink),
        Command::Spa(a) => commands::spa(a, argv, &sink),
        Command::SpaPoints(a) => commands::spa_points(a, argv, &sink),
        Command::Trap(a) => commands::trap(a, argv, &sink),
        Command::Fit(a) => commands::fit(a, &sink),
        Command::Hamiltonian(a) => commands::hamiltonian(a, argv, &sink),
        Command::Sweep(a) => sweep::run(a, argv, &sink),
        Command::FigureData(a) => figures::run(a, argv, &sink),
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let argv = match config::expand(raw) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
