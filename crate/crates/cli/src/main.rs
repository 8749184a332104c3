//! `circloc`: generate affinity matrices, estimate latent circular
//! positions, inspect spectra, seriate, and run seeded experiments.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use circloc::estimators::{Initializer, RefineGrid};
use circloc::model::{BuiltinModel, NoiseSpec, PositionMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "circloc", version, about = "Latent position estimation on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample latent positions and an observed affinity matrix.
    Generate(GenerateArgs),
    /// Estimate positions from an affinity matrix.
    Estimate(EstimateArgs),
    /// Closed-form circulant spectrum and Fourier gaps of a model, or the
    /// eigen-gaps of a matrix.
    Spectrum(SpectrumArgs),
    /// Recover a circular ordering from a matrix.
    Seriate(SeriateArgs),
    /// Run a grid of seeded trials and write trials/timings/summary CSVs.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Bin,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for all randomness; drawn from OS entropy and echoed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct Pipeline {
    /// Split into a localization subset and a refinement subset.
    #[arg(long, conflicts_with_all = ["no_split", "no_refine"])]
    split: bool,
    /// Localize and refine on all points (default).
    #[arg(long)]
    no_split: bool,
    #[arg(long, value_parser = parse_init, default_value = "spectral")]
    init: Initializer,
    /// Skip refinement and return the initial localization.
    #[arg(long)]
    no_refine: bool,
    #[arg(long, value_parser = parse_refine_grid, default_value = "full")]
    refine_grid: RefineGrid,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_model, default_value = "affine")]
    model: BuiltinModel,
    /// Gaussian noise standard deviation; 0 for none.
    #[arg(long, default_value_t = 0.0, conflicts_with = "bernoulli")]
    sd: f64,
    /// Bernoulli observations instead of Gaussian noise.
    #[arg(long)]
    bernoulli: bool,
    /// `uniform`, `regular`, or `perturbed:<delta>`.
    #[arg(long, value_parser = parse_positions, default_value = "uniform")]
    positions: PositionMode,
    /// Also write the latent positions (CSV).
    #[arg(long)]
    positions_out: Option<PathBuf>,
    /// Also write the hidden ordering, one-indexed (CSV).
    #[arg(long)]
    order_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Matrix file (CSV, JSON or binary; detected from content).
    #[arg(long = "in")]
    input: PathBuf,
    /// Known positions (CSV or JSON) to report losses against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Known ordering (one-indexed CSV) for the seriation loss.
    #[arg(long)]
    order: Option<PathBuf>,
    #[command(flatten)]
    pipeline: Pipeline,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_parser = parse_model, default_value = "affine", conflicts_with = "input")]
    model: BuiltinModel,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    /// Eigen-gaps of this matrix instead of a model.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SeriateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Known ordering (one-indexed CSV) to report the loss against.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[command(flatten)]
    pipeline: Pipeline,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// TOML experiment spec; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_model)]
    model: Option<BuiltinModel>,
    #[arg(long, conflicts_with = "bernoulli")]
    sd: Option<f64>,
    #[arg(long)]
    bernoulli: bool,
    /// Comma-separated, e.g. `nosplit-spectral,split-qap,nosplit-spectral-only`.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Trials per (n, variant).
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, value_parser = parse_positions)]
    positions: Option<PositionMode>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn parse_model(s: &str) -> Result<BuiltinModel, String> {
    s.parse().map_err(|e: circloc::Error| e.to_string())
}

fn parse_init(s: &str) -> Result<Initializer, String> {
    s.parse().map_err(|e: circloc::Error| e.to_string())
}

fn parse_refine_grid(s: &str) -> Result<RefineGrid, String> {
    match s {
        "full" => Ok(RefineGrid::Full),
        "sqrt" => Ok(RefineGrid::Sqrt),
        _ => Err(format!("expected full or sqrt, got {s:?}")),
    }
}

fn parse_positions(s: &str) -> Result<PositionMode, String> {
    match s.split_once(':') {
        None if s == "uniform" => Ok(PositionMode::Uniform),
        None if s == "regular" => Ok(PositionMode::Regular),
        Some(("perturbed", d)) => {
            let delta: f64 = d.parse().map_err(|_| format!("bad delta {d:?}"))?;
            if delta.is_finite() && delta >= 0.0 {
                Ok(PositionMode::Perturbed { delta })
            } else {
                Err(format!("delta must be finite and >= 0, got {delta}"))
            }
        }
        _ => Err(format!("expected uniform, regular or perturbed:<delta>, got {s:?}")),
    }
}

fn noise_from(sd: f64, bernoulli: bool) -> NoiseSpec {
    if bernoulli {
        NoiseSpec::Bernoulli
    } else if sd == 0.0 {
        NoiseSpec::None
    } else {
        NoiseSpec::gaussian(sd)
    }
}

/// A problem with the invocation rather than with the data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Seriate(a) => commands::seriate(a),
        Command::Experiment(a) => commands::experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
