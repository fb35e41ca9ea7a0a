//! Data-generating processes for the simulation study, the Monte Carlo
//! driver and population-level oracles (pooled regression limit, drift of
//! the marked CUSUM) used to validate estimates.
//!
//! Randomness comes from ChaCha12 keyed as `seed_base + replication_index`,
//! with standard normal draws via the ziggurat sampler; replication streams
//! are therefore reproducible across platforms and thread counts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{estimate_change, lag_embed, EstimatorConfig};
use crate::quad::adaptive_simpson;
use crate::smoothing::Sample;

/// Covariate process: i.i.d. standard normal, a stationary AR(1) covariate,
/// or lagged responses (autoregression).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Iid,
    Ts,
    Ar,
}

impl Model {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "iid" => Ok(Self::Iid),
            "ts" => Ok(Self::Ts),
            "ar" => Ok(Self::Ar),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected iid, ts or ar)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Iid => "iid",
            Self::Ts => "ts",
            Self::Ar => "ar",
        }
    }
}

/// Pre/post-change regression function pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `-0.5x` before, `0.5x` after.
    C1,
    /// `0.1x` before, `0.9x` after.
    C2,
    /// `0.5x` before, `(0.5 + 3 exp(-0.8 x^2)) x` after.
    C3,
}

impl Scenario {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "c1" => Ok(Self::C1),
            "c2" => Ok(Self::C2),
            "c3" => Ok(Self::C3),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected c1, c2 or c3)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::C1 => "c1",
            Self::C2 => "c2",
            Self::C3 => "c3",
        }
    }

    /// Pre-change regression function.
    pub fn m1(self, x: f64) -> f64 {
        match self {
            Self::C1 => -0.5 * x,
            Self::C2 => 0.1 * x,
            Self::C3 => 0.5 * x,
        }
    }

    /// Post-change regression function.
    pub fn m2(self, x: f64) -> f64 {
        match self {
            Self::C1 => 0.5 * x,
            Self::C2 => 0.9 * x,
            Self::C3 => (0.5 + 3.0 * (-0.8 * x * x).exp()) * x,
        }
    }
}

/// Error scale: constant one, `sqrt(1 + a x^2)`, or a variance regime
/// switch at time fraction `tau` (from `a1` to `a2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSpec {
    Const1,
    Hetero { a: f64 },
    VarChange { a1: f64, a2: f64, tau: f64 },
}

impl SigmaSpec {
    /// Rendering used in result tables.
    pub fn label(&self) -> String {
        match self {
            Self::Const1 => "const1".into(),
            Self::Hetero { a } => format!("hetero({a})"),
            Self::VarChange { a1, a2, tau } => format!("var_change({a1},{a2},{tau})"),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Const1 => Ok(()),
            Self::Hetero { a } => {
                if a.is_finite() && a >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("sigma coefficient must be >= 0, got {a}")))
                }
            }
            Self::VarChange { a1, a2, tau } => {
                if !(a1.is_finite() && a1 >= 0.0 && a2.is_finite() && a2 >= 0.0) {
                    return Err(Error::Config(format!(
                        "sigma coefficients must be >= 0, got {a1}, {a2}"
                    )));
                }
                if !(tau > 0.0 && tau < 1.0) {
                    return Err(Error::Config(format!(
                        "variance-change fraction must lie in (0, 1), got {tau}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Scale at (1-based) time `t` of `n` for covariate value `x`. Burn-in
    /// steps pass `t = 0` and use the pre-change regime.
    #[inline]
    fn at(&self, t: usize, n: usize, x: f64) -> f64 {
        let a = match *self {
            Self::Const1 => return 1.0,
            Self::Hetero { a } => a,
            Self::VarChange { a1, a2, tau } => {
                if t <= (tau * n as f64).floor() as usize {
                    a1
                } else {
                    a2
                }
            }
        };
        (1.0 + a * x * x).sqrt()
    }
}

/// One data-generating configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpConfig {
    pub model: Model,
    pub scenario: Scenario,
    pub sigma: SigmaSpec,
    pub n: usize,
    /// Rescaled change point; the break occurs after observation
    /// `floor(n * s0)`.
    pub s0: f64,
    pub seed: u64,
    /// Discarded start-up steps for the ts/ar recursions.
    pub burn_in: usize,
}

pub const DEFAULT_BURN_IN: usize = 200;

impl DgpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 20 {
            return Err(Error::Config(format!(
                "simulated sample size must be at least 20, got {}",
                self.n
            )));
        }
        if !(self.s0 > 0.0 && self.s0 < 1.0) {
            return Err(Error::Config(format!(
                "change point must lie in (0, 1), got {}",
                self.s0
            )));
        }
        let n = self.n as f64;
        if self.s0 * n < 2.0 || (1.0 - self.s0) * n < 2.0 {
            return Err(Error::Config(format!(
                "change point {} leaves fewer than 2 observations in a regime at n = {}",
                self.s0, self.n
            )));
        }
        self.sigma.validate()
    }

    fn break_index(&self) -> usize {
        (self.n as f64 * self.s0).floor() as usize
    }
}

/// Draws one sample with the break after observation `floor(n * s0)`.
/// A fixed seed reproduces the sample bit for bit.
pub fn generate(cfg: &DgpConfig) -> Result<Sample> {
    cfg.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let k0 = cfg.break_index();
    let (scenario, sigma) = (cfg.scenario, &cfg.sigma);

    match cfg.model {
        Model::Iid => {
            let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let y = regression_responses(&mut rng, &x, scenario, sigma, k0, n);
            Sample::new(x, 1, y)
        }
        Model::Ts => {
            let mut state = 0.0;
            for _ in 0..cfg.burn_in {
                state = 0.4 * state + rng.sample::<f64, _>(StandardNormal);
            }
            let x: Vec<f64> = (0..n)
                .map(|_| {
                    state = 0.4 * state + rng.sample::<f64, _>(StandardNormal);
                    state
                })
                .collect();
            let y = regression_responses(&mut rng, &x, scenario, sigma, k0, n);
            Sample::new(x, 1, y)
        }
        Model::Ar => {
            let mut prev = 0.0;
            for _ in 0..cfg.burn_in {
                let eps: f64 = rng.sample(StandardNormal);
                prev = scenario.m1(prev) + sigma.at(0, n, prev) * eps;
            }
            let mut series = Vec::with_capacity(n + 1);
            series.push(prev);
            for t in 1..=n {
                let m = if t <= k0 {
                    scenario.m1(prev)
                } else {
                    scenario.m2(prev)
                };
                let eps: f64 = rng.sample(StandardNormal);
                prev = m + sigma.at(t, n, prev) * eps;
                series.push(prev);
            }
            lag_embed(&series, None)
        }
    }
}

fn regression_responses(
    rng: &mut ChaCha12Rng,
    x: &[f64],
    scenario: Scenario,
    sigma: &SigmaSpec,
    k0: usize,
    n: usize,
) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(i, &xv)| {
            let t = i + 1;
            let m = if t <= k0 {
                scenario.m1(xv)
            } else {
                scenario.m2(xv)
            };
            let eps: f64 = rng.sample(StandardNormal);
            m + sigma.at(t, n, xv) * eps
        })
        .collect()
}

/// Aggregate of one Monte Carlo cell.
#[derive(Debug, Clone)]
pub struct McResult {
    /// The cell's generator settings (`seed` is the stream base).
    pub dgp: DgpConfig,
    pub estimator: EstimatorConfig,
    /// Successful estimates in replication order.
    pub estimates: Vec<f64>,
    pub mse: f64,
    pub bias: f64,
    pub replications: usize,
    pub failures: usize,
}

/// Runs `reps` replications for every `s0` in the grid. Replication `r`
/// uses seed `base.seed + r` and replications run in parallel; aggregation
/// is ordered by replication index, so results do not depend on the thread
/// count. Failed replications are excluded; more than 5% of them abort the
/// cell.
pub fn monte_carlo(
    base: &DgpConfig,
    s0_grid: &[f64],
    est: &EstimatorConfig,
    reps: usize,
) -> Result<Vec<McResult>> {
    if reps == 0 {
        return Err(Error::Config("at least one replication is required".into()));
    }
    if s0_grid.is_empty() {
        return Err(Error::Config("the change-point grid is empty".into()));
    }
    est.validate()?;

    let mut results = Vec::with_capacity(s0_grid.len());
    for &s0 in s0_grid {
        let cell = DgpConfig { s0, ..base.clone() };
        cell.validate()?;

        let outcomes: Vec<Result<f64>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let rep_cfg = DgpConfig {
                    seed: cell.seed.wrapping_add(rep as u64),
                    ..cell.clone()
                };
                let sample = generate(&rep_cfg)?;
                Ok(estimate_change(&sample, est)?.s_hat)
            })
            .collect();

        let mut estimates = Vec::with_capacity(reps);
        let mut failures = 0usize;
        for outcome in outcomes {
            match outcome {
                Ok(s_hat) => estimates.push(s_hat),
                Err(_) => failures += 1,
            }
        }
        if failures as f64 > 0.05 * reps as f64 {
            return Err(Error::Estimation(format!(
                "{failures} of {reps} replications failed at s0 = {s0}"
            )));
        }

        let count = estimates.len() as f64;
        let mse = estimates.iter().map(|s| (s - s0) * (s - s0)).sum::<f64>() / count;
        let bias = estimates.iter().map(|s| s - s0).sum::<f64>() / count;
        results.push(McResult {
            dgp: cell,
            estimator: est.clone(),
            estimates,
            mse,
            bias,
            replications: reps,
            failures,
        });
    }
    Ok(results)
}

/// Density of the standard normal distribution.
pub fn standard_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (std::f64::consts::TAU).sqrt()
}

/// Limit of the full-sample regression fit under a stationary covariate:
/// the mixture `s0 * m1(x) + (1 - s0) * m2(x)`.
pub fn pooled_oracle_mbar(scenario: Scenario, s0: f64, x: f64) -> f64 {
    s0 * scenario.m1(x) + (1.0 - s0) * scenario.m2(x)
}

/// Time factor of the CUSUM drift: `(1 - s0) s` up to the change point,
/// `(1 - s) s0` beyond it. Its unique maximum sits at `s0`.
pub fn drift_time_component(s0: f64, s: f64) -> f64 {
    if s <= s0 {
        (1.0 - s0) * s
    } else {
        (1.0 - s) * s0
    }
}

/// Mark factor of the CUSUM drift under a standard normal covariate:
/// the integral of `(m1 - m2)(x) phi(x)` over `(-inf, z]`, by adaptive
/// quadrature.
pub fn drift_mark_component(scenario: Scenario, z: f64) -> f64 {
    let lo = if z <= -12.0 { z - 1.0 } else { -12.0 };
    adaptive_simpson(
        |x| (scenario.m1(x) - scenario.m2(x)) * standard_normal_pdf(x),
        lo,
        z,
        1e-11,
    )
}

/// Population drift of the marked CUSUM at `(s, z)` for an i.i.d. standard
/// normal covariate: the product of the time and mark factors.
pub fn population_drift(scenario: Scenario, s0: f64, s: f64, z: f64) -> f64 {
    drift_time_component(s0, s) * drift_mark_component(scenario, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{Bandwidth, TrimSpec, Variant};
    use crate::kernels::{KernelFamily, KernelSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn base_config(model: Model) -> DgpConfig {
        DgpConfig {
            model,
            scenario: Scenario::C1,
            sigma: SigmaSpec::Const1,
            n: 100,
            s0: 0.5,
            seed: 99,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    fn fast_estimator() -> EstimatorConfig {
        EstimatorConfig {
            variant: Variant::Ks,
            kernel: KernelSpec::standard(KernelFamily::Epanechnikov2, 1),
            bandwidth: Bandwidth::Fixed(0.5),
            trim: TrimSpec::None,
            tie_tol: 1e-12,
        }
    }

    #[test]
    fn scenario_function_values() {
        assert_eq!(Scenario::C1.m1(1.0), -0.5);
        assert_eq!(Scenario::C1.m2(1.0), 0.5);
        assert_eq!(Scenario::C2.m1(1.0), 0.1);
        assert_eq!(Scenario::C2.m2(1.0), 0.9);
        assert_eq!(Scenario::C3.m1(0.0), 0.0);
        assert_eq!(Scenario::C3.m2(0.0), 0.0);
        assert_abs_diff_eq!(Scenario::C3.m2(1.0), 1.8479868923516647, epsilon = 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut cfg = base_config(Model::Iid);
        cfg.n = 10;
        assert!(cfg.validate().is_err());
        cfg.n = 100;
        cfg.s0 = 0.005; // fewer than 2 pre-change observations
        assert!(cfg.validate().is_err());
        cfg.s0 = 1.2;
        assert!(cfg.validate().is_err());
        cfg.s0 = 0.5;
        cfg.sigma = SigmaSpec::VarChange {
            a1: 0.1,
            a2: 0.8,
            tau: 1.5,
        };
        assert!(cfg.validate().is_err());
        cfg.sigma = SigmaSpec::Hetero { a: -1.0 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fixed_seed_reproduces_sample() {
        for model in [Model::Iid, Model::Ts, Model::Ar] {
            let cfg = base_config(model);
            let a = generate(&cfg).unwrap();
            let b = generate(&cfg).unwrap();
            assert_eq!(a.x(), b.x());
            assert_eq!(a.y(), b.y());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut cfg = base_config(Model::Iid);
        let a = generate(&cfg).unwrap();
        cfg.seed += 1;
        let b = generate(&cfg).unwrap();
        assert_ne!(a.x(), b.x());
    }

    #[test]
    fn sample_sizes() {
        for model in [Model::Iid, Model::Ts, Model::Ar] {
            let cfg = base_config(model);
            let sample = generate(&cfg).unwrap();
            assert_eq!(sample.len(), cfg.n);
            assert_eq!(sample.dim(), 1);
        }
    }

    #[test]
    fn ts_covariate_autocorrelation_near_04() {
        let mut cfg = base_config(Model::Ts);
        cfg.n = 5000;
        let sample = generate(&cfg).unwrap();
        let x = sample.x();
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        let cov: f64 = x
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum();
        let rho = cov / var;
        assert!((rho - 0.4).abs() < 0.1, "lag-1 autocorrelation {rho}");
    }

    #[test]
    fn ar_lag_embedding_shifts_series() {
        let cfg = base_config(Model::Ar);
        let sample = generate(&cfg).unwrap();
        // x_t is the previous response by construction.
        assert_eq!(&sample.x()[1..], &sample.y()[..sample.len() - 1]);
    }

    #[test]
    fn variance_change_with_equal_coefficients_matches_hetero() {
        let mut hetero = base_config(Model::Iid);
        hetero.sigma = SigmaSpec::Hetero { a: 0.5 };
        let mut switch = hetero.clone();
        switch.sigma = SigmaSpec::VarChange {
            a1: 0.5,
            a2: 0.5,
            tau: 0.4,
        };
        let a = generate(&hetero).unwrap();
        let b = generate(&switch).unwrap();
        assert_eq!(a.x(), b.x());
        assert_eq!(a.y(), b.y());
    }

    #[test]
    fn monte_carlo_single_rep_mse() {
        let results = monte_carlo(&base_config(Model::Iid), &[0.5], &fast_estimator(), 1).unwrap();
        assert_eq!(results.len(), 1);
        let r = &results[0];
        assert_eq!(r.estimates.len(), 1);
        let dev = r.estimates[0] - 0.5;
        assert_relative_eq!(r.mse, dev * dev, max_relative = 1e-15);
        assert_relative_eq!(r.bias, dev, max_relative = 1e-15);
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let cfg = base_config(Model::Iid);
        let a = monte_carlo(&cfg, &[0.3, 0.7], &fast_estimator(), 6).unwrap();
        let b = monte_carlo(&cfg, &[0.3, 0.7], &fast_estimator(), 6).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.estimates, rb.estimates);
            assert_eq!(ra.mse, rb.mse);
            assert_eq!(ra.bias, rb.bias);
        }
    }

    #[test]
    fn monte_carlo_aborts_on_failures() {
        // An absurdly small trim box empties every replication.
        let mut est = fast_estimator();
        est.trim = TrimSpec::Fixed(1e-12);
        let res = monte_carlo(&base_config(Model::Iid), &[0.5], &est, 4);
        assert!(matches!(res, Err(Error::Estimation(_))));
    }

    #[test]
    fn monte_carlo_localizes_midpoint_change() {
        let mut cfg = base_config(Model::Iid);
        cfg.n = 150;
        cfg.sigma = SigmaSpec::Hetero { a: 0.5 };
        let results = monte_carlo(&cfg, &[0.5], &fast_estimator(), 8).unwrap();
        assert!(
            results[0].mse < 0.1,
            "mse unexpectedly large: {}",
            results[0].mse
        );
    }

    #[test]
    fn pooled_oracle_values() {
        assert_abs_diff_eq!(
            pooled_oracle_mbar(Scenario::C1, 0.5, 1.0),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            pooled_oracle_mbar(Scenario::C2, 0.5, 1.0),
            0.5,
            epsilon = 1e-15
        );
        // Degenerate mixture weight: only the pre-change function remains.
        assert_eq!(
            pooled_oracle_mbar(Scenario::C3, 1.0, 0.7),
            Scenario::C3.m1(0.7)
        );
    }

    #[test]
    fn drift_time_factor_shape() {
        let s0 = 0.37;
        assert_abs_diff_eq!(
            drift_time_component(s0, s0),
            s0 * (1.0 - s0),
            epsilon = 1e-15
        );
        assert_eq!(drift_time_component(s0, 0.0), 0.0);
        assert_eq!(drift_time_component(s0, 1.0), 0.0);

        // Well-separated maximum on a dense grid including s0 itself.
        let peak = drift_time_component(s0, s0);
        for i in 0..=500 {
            let s = i as f64 / 500.0;
            let v = drift_time_component(s0, s);
            assert!(v <= peak + 1e-15);
            if (s - s0).abs() > 1e-9 {
                assert!(v < peak);
            }
        }
    }

    #[test]
    fn drift_mark_factor_matches_analytic_forms() {
        // C1: m1 - m2 = -x, so the integral of -x phi(x) is phi(z).
        for z in [-1.5, -0.3, 0.0, 0.8, 2.0] {
            assert_abs_diff_eq!(
                drift_mark_component(Scenario::C1, z),
                standard_normal_pdf(z),
                epsilon = 1e-8
            );
            // C2: m1 - m2 = -0.8x.
            assert_abs_diff_eq!(
                drift_mark_component(Scenario::C2, z),
                0.8 * standard_normal_pdf(z),
                epsilon = 1e-8
            );
            // C3: m1 - m2 = -3x exp(-0.8 x^2); the antiderivative of
            // -3x exp(-1.3 x^2)/sqrt(2 pi) is (3/2.6) exp(-1.3 z^2)/sqrt(2 pi).
            let expected = 3.0 / 2.6 * (-1.3 * z * z).exp() / std::f64::consts::TAU.sqrt();
            assert_abs_diff_eq!(
                drift_mark_component(Scenario::C3, z),
                expected,
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn population_drift_vanishes_at_boundaries() {
        for scenario in [Scenario::C1, Scenario::C2, Scenario::C3] {
            assert_eq!(population_drift(scenario, 0.4, 0.0, 0.3), 0.0);
            assert_eq!(population_drift(scenario, 0.4, 1.0, 0.3), 0.0);
        }
    }

    #[test]
    fn parse_round_trips() {
        for name in ["iid", "ts", "ar"] {
            assert_eq!(Model::parse(name).unwrap().name(), name);
        }
        for name in ["c1", "c2", "c3"] {
            assert_eq!(Scenario::parse(name).unwrap().name(), name);
        }
        assert!(Model::parse("bogus").is_err());
        assert!(Scenario::parse("c9").is_err());
    }
}
