//! `cpkernel`: change-point estimation for nonparametric (auto-)regression
//! from the command line.
//!
//! Subcommands: `estimate` (CSV in, JSON result out, optional profile CSV),
//! `simulate` (JSON experiment config in, MSE table out) and `bandwidth`
//! (cross-validation table for a dataset). Exit codes: 0 on success, 1 on
//! usage/input errors, 2 on estimation errors.

mod config;
mod ingest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cpkernel_core::{
    estimate_change, resolve_trim, select_bandwidth, Bandwidth, EstimatorConfig, KernelFamily,
    KernelSpec, TrimSpec, Variant,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Estimation(String),
}

impl From<cpkernel_core::Error> for CliError {
    fn from(e: cpkernel_core::Error) -> Self {
        match e {
            cpkernel_core::Error::Estimation(_) => Self::Estimation(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "cpkernel",
    version,
    about = "Offline change-point estimation via CUSUMs of marked regression residuals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the change point of a CSV dataset
    Estimate(EstimateArgs),
    /// Run a Monte Carlo experiment described by a JSON config
    Simulate(SimulateArgs),
    /// Select a bandwidth by cross-validation and report the score table
    Bandwidth(BandwidthArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV with a header: optional `label`, covariates `x` (or
    /// `x1`..`xd`) and response `y`
    #[arg(long)]
    input: PathBuf,

    /// Write the JSON result here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,

    /// Profile functional: ks or cvm
    #[arg(long, default_value = "ks")]
    variant: String,

    /// Kernel family: epa2, epa4 or uniform
    #[arg(long, default_value = "epa4")]
    kernel: String,

    /// "cv" or a fixed bandwidth value
    #[arg(long, default_value = "cv")]
    bandwidth: String,

    /// "auto", "none" or a box half-width
    #[arg(long, default_value = "auto")]
    trim: String,

    /// Treat the file as a plain series: y regressed on its own lag
    #[arg(long)]
    autoregressive: bool,

    /// Dump the profile as CSV (columns k, s, ks, cvm, ks_scaled,
    /// cusum_plain and optionally critical)
    #[arg(long)]
    profile_out: Option<PathBuf>,

    /// Constant annotation column for the profile dump (e.g. a test's
    /// critical value)
    #[arg(long)]
    critical_value: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON experiment configuration
    #[arg(long)]
    config: PathBuf,

    /// Write the result CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,

    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,

    /// Override the config's replication count
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Args)]
struct BandwidthArgs {
    /// Input CSV, same layout as for `estimate`
    #[arg(long)]
    input: PathBuf,

    /// Kernel family: epa2, epa4 or uniform
    #[arg(long, default_value = "epa4")]
    kernel: String,

    /// "auto", "none" or a box half-width
    #[arg(long, default_value = "auto")]
    trim: String,

    /// Treat the file as a plain series
    #[arg(long)]
    autoregressive: bool,

    /// Write the CV score table here
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_bandwidth(raw: &str) -> CliResult<Bandwidth> {
    if raw.trim().eq_ignore_ascii_case("cv") {
        return Ok(Bandwidth::CrossValidation);
    }
    match raw.trim().parse::<f64>() {
        Ok(h) if h.is_finite() && h > 0.0 => Ok(Bandwidth::Fixed(h)),
        _ => Err(CliError::Usage(format!(
            "--bandwidth expects 'cv' or a positive number, got '{raw}'"
        ))),
    }
}

fn parse_trim(raw: &str) -> CliResult<TrimSpec> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "auto" => Ok(TrimSpec::Auto),
        "none" => Ok(TrimSpec::None),
        other => match other.parse::<f64>() {
            Ok(c) if c.is_finite() && c > 0.0 => Ok(TrimSpec::Fixed(c)),
            _ => Err(CliError::Usage(format!(
                "--trim expects 'auto', 'none' or a positive number, got '{raw}'"
            ))),
        },
    }
}

fn run_estimate(args: &EstimateArgs) -> CliResult<()> {
    let sample = ingest::ingest_csv(&args.input, args.autoregressive)?;
    let variant = Variant::parse(&args.variant)?;
    let family = KernelFamily::parse(&args.kernel)?;
    let mut config = EstimatorConfig::new(KernelSpec::standard(family, sample.dim()));
    config.variant = variant;
    config.bandwidth = parse_bandwidth(&args.bandwidth)?;
    config.trim = parse_trim(&args.trim)?;
    let estimate = estimate_change(&sample, &config)?;
    report::write_estimate_json(args.output.as_deref(), &estimate, variant, sample.len())?;
    if let Some(path) = &args.profile_out {
        report::write_profile_csv(path, &estimate.profile, args.critical_value)?;
    }
    Ok(())
}

fn run_simulate(args: &SimulateArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::Usage(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut experiment = config::parse_experiment(&text)?;
    if let Some(seed) = args.seed {
        experiment.seed = seed;
    }
    if let Some(reps) = args.reps {
        experiment.reps = reps;
    }
    let rows = config::run_experiment(&experiment)?;
    report::write_mse_csv(args.output.as_deref(), &rows)?;
    Ok(())
}

fn run_bandwidth(args: &BandwidthArgs) -> CliResult<()> {
    let sample = ingest::ingest_csv(&args.input, args.autoregressive)?;
    let family = KernelFamily::parse(&args.kernel)?;
    let kernel = KernelSpec::standard(family, sample.dim());
    let trim = resolve_trim(parse_trim(&args.trim)?, &sample)?;
    let selection = select_bandwidth(&sample, &kernel, &trim, None)?;
    println!("h = {}", selection.h);
    if let Some(path) = &args.output {
        report::write_bandwidth_csv(path, &selection)?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Estimate(args) => run_estimate(&args),
        Command::Simulate(args) => run_simulate(&args),
        Command::Bandwidth(args) => run_bandwidth(&args),
    }
}

fn init_thread_pool() -> CliResult<()> {
    if let Ok(raw) = std::env::var("CPKERNEL_THREADS") {
        let threads: usize = raw.parse().map_err(|_| {
            CliError::Usage(format!("CPKERNEL_THREADS must be a positive integer, got '{raw}'"))
        })?;
        if threads == 0 {
            return Err(CliError::Usage(
                "CPKERNEL_THREADS must be a positive integer".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };

    let outcome = init_thread_pool().and_then(|()| run(cli));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Estimation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
