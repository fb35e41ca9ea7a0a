//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them).
//!
//! The Monte Carlo criteria run a few hundred replications each at fixed
//! seeds; on a single core the whole suite takes a few minutes.

use std::time::Instant;

use cpkernel_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn paper_estimator() -> EstimatorConfig {
    EstimatorConfig::new(KernelSpec::standard(KernelFamily::Epanechnikov4, 1))
}

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[test]
fn ac01_fast_profile_matches_naive_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xAC01);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.random_range(1..=64);
        let quantized = case % 2 == 0;
        let marks: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                if quantized {
                    // Coarse lattice forces duplicate coordinates.
                    (z * 2.0).round() / 2.0
                } else {
                    z
                }
            })
            .collect();
        let residuals: Vec<f64> = (0..n)
            .map(|_| {
                // Heavy-tailed draw: normal over square root of a uniform.
                let z: f64 = rng.sample(StandardNormal);
                let u: f64 = rng.random_range(0.001..1.0);
                z / u.sqrt()
            })
            .collect();
        let weights: Vec<bool> = (0..n).map(|_| rng.random_range(0..5) != 0).collect();
        let mr = MarkedResiduals::new(residuals, weights, marks, 1).unwrap();
        let naive = ks_profile_naive(&mr);
        let fast = ks_profile_fast(&mr);
        assert_eq!(naive.len(), fast.len());
        for (a, b) in naive.iter().zip(&fast) {
            let diff = (a - b).abs();
            worst = worst.max(diff);
            assert!(
                diff <= 1e-12,
                "fast/naive disagree by {diff} on a case with n = {n}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "AC-1 took {elapsed:?}");
    println!("AC-1 PASS: 100 instances, max |fast - naive| = {worst:.2e}, {elapsed:?}");
}

#[test]
fn ac02_kernel_moments() {
    let start = Instant::now();
    let epa2 = kernel_moment_report(&KernelSpec::standard(KernelFamily::Epanechnikov2, 1));
    let epa4 = kernel_moment_report(&KernelSpec::standard(KernelFamily::Epanechnikov4, 1));
    assert!((epa2.mass - 1.0).abs() <= 1e-8, "epa2 mass {}", epa2.mass);
    assert!(epa2.m1.abs() <= 1e-8, "epa2 m1 {}", epa2.m1);
    assert!((epa4.mass - 1.0).abs() <= 1e-8, "epa4 mass {}", epa4.mass);
    assert!(epa4.m1.abs() <= 1e-8, "epa4 m1 {}", epa4.m1);
    assert!(epa4.m2.abs() <= 1e-8, "epa4 m2 {}", epa4.m2);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "AC-2 took {elapsed:?}");
    println!(
        "AC-2 PASS: epa2 (mass {:.1e}, m1 {:.1e}), epa4 (mass {:.1e}, m1 {:.1e}, m2 {:.1e}), {elapsed:?}",
        epa2.mass - 1.0,
        epa2.m1,
        epa4.mass - 1.0,
        epa4.m1,
        epa4.m2
    );
}

#[test]
fn ac03_consistency_mse_shrinks_with_n() {
    let start = Instant::now();
    let est = paper_estimator();
    let mut mse_by_n = Vec::new();
    for n in [100usize, 500, 1000] {
        let base = DgpConfig {
            model: Model::Iid,
            scenario: Scenario::C1,
            sigma: SigmaSpec::Hetero { a: 0.5 },
            n,
            s0: 0.5,
            seed: 0xAC03,
            burn_in: DEFAULT_BURN_IN,
        };
        let result = monte_carlo(&base, &[0.5], &est, 200).unwrap();
        mse_by_n.push(result[0].mse);
    }
    let (m100, m500, m1000) = (mse_by_n[0], mse_by_n[1], mse_by_n[2]);
    assert!(m100 > m500, "MSE(100) = {m100} not above MSE(500) = {m500}");
    assert!(m500 > m1000, "MSE(500) = {m500} not above MSE(1000) = {m1000}");
    assert!(m1000 < 0.01, "MSE(1000) = {m1000} not below 0.01");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "AC-3 took {elapsed:?}");
    println!("AC-3 PASS: mse(100) = {m100:.5}, mse(500) = {m500:.5}, mse(1000) = {m1000:.6}, {elapsed:?}");
}

#[test]
fn ac04_boundary_degradation_and_asymmetry() {
    let base = DgpConfig {
        model: Model::Iid,
        scenario: Scenario::C1,
        sigma: SigmaSpec::Hetero { a: 0.5 },
        n: 100,
        s0: 0.5,
        seed: 0xAC04,
        burn_in: DEFAULT_BURN_IN,
    };
    let results = monte_carlo(&base, &[0.1, 0.5, 0.9], &paper_estimator(), 300).unwrap();
    let (m01, m05, m09) = (results[0].mse, results[1].mse, results[2].mse);
    assert!(
        m01 > 2.0 * m05,
        "MSE(s0=0.1) = {m01} not above 2 * MSE(s0=0.5) = {}",
        2.0 * m05
    );
    assert!(m01 > m09, "MSE(s0=0.1) = {m01} not above MSE(s0=0.9) = {m09}");
    println!("AC-4 PASS: mse(0.1) = {m01:.4}, mse(0.5) = {m05:.4}, mse(0.9) = {m09:.4}");
}

#[test]
fn ac05_error_scales_like_one_over_n() {
    let est = paper_estimator();
    let mut medians = Vec::new();
    for n in [200usize, 800] {
        let base = DgpConfig {
            model: Model::Iid,
            scenario: Scenario::C2,
            sigma: SigmaSpec::Hetero { a: 0.5 },
            n,
            s0: 0.5,
            seed: 0xAC05,
            burn_in: DEFAULT_BURN_IN,
        };
        let result = monte_carlo(&base, &[0.5], &est, 300).unwrap();
        let mut scaled: Vec<f64> = result[0]
            .estimates
            .iter()
            .map(|s| n as f64 * (s - 0.5).abs())
            .collect();
        medians.push(median(&mut scaled));
    }
    let (med200, med800) = (medians[0], medians[1]);
    assert!(
        med800 <= 3.0 * med200,
        "median n|s_hat - s0|: {med800} at n=800 vs {med200} at n=200"
    );
    println!("AC-5 PASS: median n|s_hat - s0| = {med200} (n=200), {med800} (n=800)");
}

#[test]
fn ac06_autoregressive_consistency() {
    let base = DgpConfig {
        model: Model::Ar,
        scenario: Scenario::C1,
        sigma: SigmaSpec::Const1,
        n: 1000,
        s0: 0.5,
        seed: 0xAC06,
        burn_in: DEFAULT_BURN_IN,
    };
    let result = monte_carlo(&base, &[0.5], &paper_estimator(), 200).unwrap();
    let mse = result[0].mse;
    assert!(mse < 0.01, "AR MSE = {mse} not below 0.01");
    println!("AC-6 PASS: autoregressive mse = {mse:.6} ({} failures)", result[0].failures);
}

#[test]
fn ac07_variance_change_robustness() {
    let base = DgpConfig {
        model: Model::Iid,
        scenario: Scenario::C1,
        sigma: SigmaSpec::VarChange {
            a1: 0.1,
            a2: 0.8,
            tau: 0.4,
        },
        n: 1000,
        s0: 0.5,
        seed: 0xAC07,
        burn_in: DEFAULT_BURN_IN,
    };
    let result = monte_carlo(&base, &[0.5], &paper_estimator(), 200).unwrap();
    let mse = result[0].mse;
    assert!(mse < 0.01, "MSE under a variance change = {mse} not below 0.01");
    println!("AC-7 PASS: mse = {mse:.6} with a variance regime switch at 0.4n");
}

#[test]
fn ac08_ks_and_cvm_agree() {
    let est = paper_estimator();
    let reps = 200;
    let mut close = 0;
    let mut worst = 0.0f64;
    for rep in 0..reps {
        let cfg = DgpConfig {
            model: Model::Iid,
            scenario: Scenario::C1,
            sigma: SigmaSpec::Hetero { a: 0.5 },
            n: 1000,
            s0: 0.5,
            seed: 0xAC08u64.wrapping_add(rep),
            burn_in: DEFAULT_BURN_IN,
        };
        let sample = generate(&cfg).unwrap();
        // One pipeline run yields both profiles; the variants differ only
        // in which vector is maximized.
        let ks_est = estimate_change(&sample, &est).unwrap();
        let n = sample.len();
        let s_ks = ks_est.s_hat;
        let s_cvm = profile_argmax(&ks_est.profile.cvm, est.tie_tol) as f64 / n as f64;
        let diff = (s_ks - s_cvm).abs();
        worst = worst.max(diff);
        if diff <= 0.05 {
            close += 1;
        }
    }
    assert!(
        close * 100 >= 90 * reps,
        "KS and CvM within 0.05 in only {close}/{reps} replications"
    );
    println!(
        "AC-8 PASS: |s_ks - s_cvm| <= 0.05 in {close}/{reps} replications (max diff {worst:.3})"
    );
}

#[test]
fn ac09_nw_fit_approaches_pooled_limit() {
    let cfg = DgpConfig {
        model: Model::Iid,
        scenario: Scenario::C2,
        sigma: SigmaSpec::Const1,
        n: 4000,
        s0: 0.5,
        seed: 0xAC09,
        burn_in: DEFAULT_BURN_IN,
    };
    let sample = generate(&cfg).unwrap();
    let kernel = KernelSpec::standard(KernelFamily::Epanechnikov2, 1);
    let grid: Vec<f64> = (0..=40).map(|i| -1.0 + i as f64 * 0.05).collect();
    let fits = nw_predict(&sample, &kernel, 0.3, &grid, None).unwrap();
    let mut abs_dev = 0.0;
    for (fit, &x) in fits.iter().zip(&grid) {
        assert!(fit.valid, "invalid fit at x = {x}");
        abs_dev += (fit.value - pooled_oracle_mbar(Scenario::C2, 0.5, x)).abs();
    }
    let mad = abs_dev / grid.len() as f64;
    assert!(mad < 0.1, "mean absolute deviation {mad} not below 0.1");
    println!("AC-9 PASS: mean |nw - pooled limit| = {mad:.4} over 41 grid points");
}
