//! Change-point estimators: the minimal time fraction maximizing the
//! Kolmogorov-Smirnov (or Cramér-von Mises) profile of the marked
//! residual process, plus the autoregressive lag embedding.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::mep::{build_marked_residuals, CusumProfile};
use crate::smoothing::{default_trim, nw_predict, select_bandwidth, Sample, TrimRegion};

/// Smallest sample size accepted by [`estimate_change`].
pub const MIN_SAMPLE_SIZE: usize = 10;

/// Which profile functional drives the argmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Ks,
    Cvm,
}

impl Variant {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "ks" => Ok(Self::Ks),
            "cvm" => Ok(Self::Cvm),
            other => Err(Error::Config(format!(
                "unknown estimator variant '{other}' (expected ks or cvm)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ks => "ks",
            Self::Cvm => "cvm",
        }
    }
}

/// Bandwidth policy for the regression fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Fixed(f64),
    CrossValidation,
}

/// Trimming policy; `Auto` derives the box from the sample scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrimSpec {
    None,
    Auto,
    Fixed(f64),
}

/// Full configuration of one estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub variant: Variant,
    pub kernel: KernelSpec,
    pub bandwidth: Bandwidth,
    pub trim: TrimSpec,
    /// Relative tolerance for profile argmax ties; within this band of the
    /// maximum the smallest index wins.
    pub tie_tol: f64,
}

impl EstimatorConfig {
    /// KS variant, cross-validated bandwidth, automatic trimming.
    pub fn new(kernel: KernelSpec) -> Self {
        Self {
            variant: Variant::Ks,
            kernel,
            bandwidth: Bandwidth::CrossValidation,
            trim: TrimSpec::Auto,
            tie_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Config(format!(
                    "fixed bandwidth must be positive and finite, got {h}"
                )));
            }
        }
        if let TrimSpec::Fixed(c) = self.trim {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::Config(format!(
                    "trim half-width must be positive and finite, got {c}"
                )));
            }
        }
        if !(0.0..=1e-6).contains(&self.tie_tol) {
            return Err(Error::Config(format!(
                "tie tolerance must lie in [0, 1e-6], got {}",
                self.tie_tol
            )));
        }
        Ok(())
    }
}

/// The estimate: `s_hat = k_hat / n`, the achieved profile maximum and the
/// full profile for plotting or further analysis.
#[derive(Debug, Clone)]
pub struct ChangePointEstimate {
    /// Estimated rescaled change point in `[0, 1]`; 0 means no localizable
    /// change (flat profile).
    pub s_hat: f64,
    /// `floor(n * s_hat)`: the number of pre-change observations.
    pub k_hat: usize,
    /// Profile value at `k_hat` (squared scale for the CvM variant).
    pub stat_max: f64,
    pub profile: CusumProfile,
    pub bandwidth_used: f64,
    /// Label of the first post-change observation, when labels exist and
    /// `k_hat < n`.
    pub time_label: Option<String>,
}

/// Smallest index attaining the maximum of `values` up to a relative tie
/// tolerance: every entry within `tie_tol * max` of the maximum counts as
/// attaining it.
pub fn profile_argmax(values: &[f64], tie_tol: f64) -> usize {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = max - tie_tol * max.abs();
    values
        .iter()
        .position(|&v| v >= threshold)
        .unwrap_or(0)
}

/// Resolves a trimming policy against a concrete sample.
pub fn resolve_trim(spec: TrimSpec, sample: &Sample) -> Result<TrimRegion> {
    match spec {
        TrimSpec::None => Ok(TrimRegion::none()),
        TrimSpec::Auto => default_trim(sample),
        TrimSpec::Fixed(c) => TrimRegion::uniform_box(c, sample.dim()),
    }
}

/// Runs the full pipeline: optional CV bandwidth, full-sample NW fit,
/// marked residuals, both profiles, then the minimal argmax of the variant's
/// profile.
pub fn estimate_change(sample: &Sample, config: &EstimatorConfig) -> Result<ChangePointEstimate> {
    config.validate()?;
    let n = sample.len();
    if n < MIN_SAMPLE_SIZE {
        return Err(Error::Estimation(format!(
            "sample size {n} is below the minimum of {MIN_SAMPLE_SIZE}"
        )));
    }
    if config.kernel.dimension != sample.dim() {
        return Err(Error::Config(format!(
            "kernel dimension {} does not match sample dimension {}",
            config.kernel.dimension,
            sample.dim()
        )));
    }

    let trim = resolve_trim(config.trim, sample)?;
    let bandwidth = match config.bandwidth {
        Bandwidth::Fixed(h) => h,
        Bandwidth::CrossValidation => {
            select_bandwidth(sample, &config.kernel, &trim, None)?.h
        }
    };

    let fitted = nw_predict(sample, &config.kernel, bandwidth, sample.x(), None)?;
    let mr = build_marked_residuals(sample, &fitted, &trim)?;
    let profile = CusumProfile::compute(&mr);

    let driving = match config.variant {
        Variant::Ks => &profile.ks,
        Variant::Cvm => &profile.cvm,
    };
    let k_hat = profile_argmax(driving, config.tie_tol);
    let stat_max = driving[k_hat];
    let s_hat = k_hat as f64 / n as f64;
    let time_label = sample
        .labels()
        .and_then(|labels| labels.get(k_hat).cloned());

    Ok(ChangePointEstimate {
        s_hat,
        k_hat,
        stat_max,
        profile,
        bandwidth_used: bandwidth,
        time_label,
    })
}

/// Embeds a series into lag-1 pairs: `x_t = series[t-1]`, `y_t = series[t]`.
/// Labels, when given, must cover the full series and are aligned to the
/// responses.
pub fn lag_embed(series: &[f64], labels: Option<&[String]>) -> Result<Sample> {
    if series.len() < MIN_SAMPLE_SIZE + 1 {
        return Err(Error::Estimation(format!(
            "autoregressive series needs at least {} values, got {}",
            MIN_SAMPLE_SIZE + 1,
            series.len()
        )));
    }
    let x = series[..series.len() - 1].to_vec();
    let y = series[1..].to_vec();
    let sample = Sample::univariate(x, y)?;
    match labels {
        Some(ls) => {
            if ls.len() != series.len() {
                return Err(Error::Data(format!(
                    "{} labels for a series of {} values",
                    ls.len(),
                    series.len()
                )));
            }
            sample.with_labels(ls[1..].to_vec())
        }
        None => Ok(sample),
    }
}

/// The presentation-scale KS statistic `sqrt(n) * max_k ks[k]`, as drawn in
/// CUSUM plots.
pub fn ks_statistic(profile: &CusumProfile, n: usize) -> f64 {
    let max = profile.ks.iter().cloned().fold(0.0f64, f64::max);
    (n as f64).sqrt() * max
}
