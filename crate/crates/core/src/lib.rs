//! Offline change-point estimation in nonparametric (auto-)regression.
//!
//! Given observations `(y_t, x_t)` whose regression function switches at an
//! unknown time, the estimator smooths the full sample with a
//! Nadaraya-Watson fit, forms the sequential marked empirical process of the
//! residuals and locates the change at the earliest time fraction where the
//! CUSUM surface attains its supremum. A Kolmogorov-Smirnov functional is
//! the default; a Cramér-von Mises functional is available as a variant.
//! Covariates may be serially dependent and errors conditionally
//! heteroscedastic; the autoregressive case (lagged responses as
//! covariates) is handled through an embedding step.
//!
//! Modules:
//!
//! - [`kernels`]: compactly supported smoothing kernels (second- and
//!   fourth-order Epanechnikov, uniform) with quadrature-checked moments.
//! - [`smoothing`]: the regression fit, leave-one-out cross-validation
//!   bandwidth selection and trimming weights.
//! - [`mep`]: the marked empirical process and its KS/CvM profiles, with a
//!   naive reference and an `O(n log n)` segment-tree path.
//! - [`estimators`]: the change-point estimators and the lag embedding.
//! - [`simulate`]: data-generating processes, a reproducible Monte Carlo
//!   driver and population-level oracles.

pub mod error;
pub mod estimators;
pub mod kernels;
pub mod mep;
mod quad;
pub mod simulate;
pub mod smoothing;

pub use error::{Error, Result};
pub use estimators::{
    estimate_change, ks_statistic, lag_embed, profile_argmax, resolve_trim, Bandwidth,
    ChangePointEstimate, EstimatorConfig, TrimSpec, Variant, MIN_SAMPLE_SIZE,
};
pub use kernels::{kernel_moment_report, KernelFamily, KernelSpec, MomentReport};
pub use mep::{
    build_marked_residuals, cvm_profile, ks_profile_fast, ks_profile_naive, plain_cusum,
    CusumProfile, EvalMode, MarkedResiduals,
};
pub use simulate::{
    drift_mark_component, drift_time_component, generate, monte_carlo, pooled_oracle_mbar,
    population_drift, standard_normal_pdf, DgpConfig, McResult, Model, Scenario, SigmaSpec,
    DEFAULT_BURN_IN,
};
pub use smoothing::{
    default_bandwidth_grid, default_trim, loocv_score, nw_predict, nw_predict_with_eps,
    select_bandwidth, BandwidthSelection, NwFit, Sample, TrimRegion, NW_DENOM_EPS,
};
