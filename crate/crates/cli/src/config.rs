//! JSON experiment configuration for the `simulate` subcommand.
//!
//! ```json
//! {
//!   "model": "iid",
//!   "scenario": "c1",
//!   "sigma": {"type": "hetero", "a": 0.5},
//!   "n": [100, 500, 1000],
//!   "s0": [0.1, 0.3, 0.5, 0.7, 0.9],
//!   "reps": 1000,
//!   "seed": 20240801,
//!   "burn_in": 200,
//!   "estimator": {"variant": "ks", "kernel": "epa4", "bandwidth": "cv", "trim": "auto"}
//! }
//! ```

use cpkernel_core::{
    monte_carlo, Bandwidth, DgpConfig, EstimatorConfig, KernelFamily, KernelSpec, McResult, Model,
    Scenario, SigmaSpec, TrimSpec, Variant, DEFAULT_BURN_IN,
};
use serde::Deserialize;

use crate::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentJson {
    model: String,
    scenario: String,
    sigma: SigmaJson,
    n: Vec<usize>,
    s0: Vec<f64>,
    reps: usize,
    seed: u64,
    #[serde(default)]
    burn_in: Option<usize>,
    #[serde(default)]
    estimator: Option<EstimatorJson>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SigmaJson {
    Const1,
    Hetero { a: f64 },
    VarChange { a1: f64, a2: f64, tau: f64 },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorJson {
    #[serde(default)]
    variant: Option<String>,
    #[serde(default)]
    kernel: Option<String>,
    #[serde(default)]
    bandwidth: Option<serde_json::Value>,
    #[serde(default)]
    trim: Option<serde_json::Value>,
}

/// A fully resolved experiment: generator template, estimator and grids.
pub struct Experiment {
    pub model: Model,
    pub scenario: Scenario,
    pub sigma: SigmaSpec,
    pub n_values: Vec<usize>,
    pub s0_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub estimator: EstimatorConfig,
}

fn bandwidth_from_json(value: &serde_json::Value) -> CliResult<Bandwidth> {
    match value {
        serde_json::Value::String(s) if s.eq_ignore_ascii_case("cv") => {
            Ok(Bandwidth::CrossValidation)
        }
        serde_json::Value::Number(num) => match num.as_f64() {
            Some(h) if h.is_finite() && h > 0.0 => Ok(Bandwidth::Fixed(h)),
            _ => Err(CliError::Usage(format!(
                "estimator.bandwidth must be positive, got {num}"
            ))),
        },
        other => Err(CliError::Usage(format!(
            "estimator.bandwidth must be \"cv\" or a positive number, got {other}"
        ))),
    }
}

fn trim_from_json(value: &serde_json::Value) -> CliResult<TrimSpec> {
    match value {
        serde_json::Value::String(s) if s.eq_ignore_ascii_case("auto") => Ok(TrimSpec::Auto),
        serde_json::Value::String(s) if s.eq_ignore_ascii_case("none") => Ok(TrimSpec::None),
        serde_json::Value::Number(num) => match num.as_f64() {
            Some(c) if c.is_finite() && c > 0.0 => Ok(TrimSpec::Fixed(c)),
            _ => Err(CliError::Usage(format!(
                "estimator.trim must be positive, got {num}"
            ))),
        },
        other => Err(CliError::Usage(format!(
            "estimator.trim must be \"auto\", \"none\" or a positive number, got {other}"
        ))),
    }
}

/// Parses and validates the JSON text of an experiment.
pub fn parse_experiment(text: &str) -> CliResult<Experiment> {
    let json: ExperimentJson = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("invalid experiment config: {e}")))?;

    if json.n.is_empty() {
        return Err(CliError::Usage("experiment needs at least one sample size".into()));
    }
    if json.s0.is_empty() {
        return Err(CliError::Usage("experiment needs at least one change point".into()));
    }

    let sigma = match json.sigma {
        SigmaJson::Const1 => SigmaSpec::Const1,
        SigmaJson::Hetero { a } => SigmaSpec::Hetero { a },
        SigmaJson::VarChange { a1, a2, tau } => SigmaSpec::VarChange { a1, a2, tau },
    };

    let est_json = json.estimator.unwrap_or_default();
    let family = match &est_json.kernel {
        Some(name) => KernelFamily::parse(name)?,
        None => KernelFamily::Epanechnikov4,
    };
    let mut estimator = EstimatorConfig::new(KernelSpec::standard(family, 1));
    if let Some(variant) = &est_json.variant {
        estimator.variant = Variant::parse(variant)?;
    }
    if let Some(value) = &est_json.bandwidth {
        estimator.bandwidth = bandwidth_from_json(value)?;
    }
    if let Some(value) = &est_json.trim {
        estimator.trim = trim_from_json(value)?;
    }

    Ok(Experiment {
        model: Model::parse(&json.model)?,
        scenario: Scenario::parse(&json.scenario)?,
        sigma,
        n_values: json.n,
        s0_grid: json.s0,
        reps: json.reps,
        seed: json.seed,
        burn_in: json.burn_in.unwrap_or(DEFAULT_BURN_IN),
        estimator,
    })
}

/// Runs every (n, s0) cell of the experiment; rows come back in config
/// order and are deterministic for a fixed seed.
pub fn run_experiment(experiment: &Experiment) -> CliResult<Vec<McResult>> {
    let mut rows = Vec::with_capacity(experiment.n_values.len() * experiment.s0_grid.len());
    for &n in &experiment.n_values {
        let base = DgpConfig {
            model: experiment.model,
            scenario: experiment.scenario,
            sigma: experiment.sigma,
            n,
            s0: experiment.s0_grid[0],
            seed: experiment.seed,
            burn_in: experiment.burn_in,
        };
        rows.extend(monte_carlo(
            &base,
            &experiment.s0_grid,
            &experiment.estimator,
            experiment.reps,
        )?);
    }
    Ok(rows)
}
