//! Result writers: JSON estimate records, profile CSVs, Monte Carlo MSE
//! tables and CV score tables. Floats are printed in Rust's shortest
//! round-trip form, so identical inputs give byte-identical output files.

use std::io::Write;
use std::path::Path;

use cpkernel_core::{
    BandwidthSelection, ChangePointEstimate, CusumProfile, McResult, Variant,
};
use serde::Serialize;

use crate::CliResult;

#[derive(Serialize)]
struct EstimateRecord<'a> {
    s_hat: f64,
    k_hat: usize,
    time_label: Option<&'a str>,
    /// Achieved profile maximum; square-rooted for the CvM variant so both
    /// variants report on a comparable scale.
    stat_max: f64,
    bandwidth_used: f64,
    variant: &'a str,
    n: usize,
}

fn open_sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn write_estimate_json(
    path: Option<&Path>,
    estimate: &ChangePointEstimate,
    variant: Variant,
    n: usize,
) -> CliResult<()> {
    let stat_max = match variant {
        Variant::Ks => estimate.stat_max,
        Variant::Cvm => estimate.stat_max.sqrt(),
    };
    let record = EstimateRecord {
        s_hat: estimate.s_hat,
        k_hat: estimate.k_hat,
        time_label: estimate.time_label.as_deref(),
        stat_max,
        bandwidth_used: estimate.bandwidth_used,
        variant: variant.name(),
        n,
    };
    let mut out = open_sink(path)?;
    serde_json::to_writer_pretty(&mut out, &record)
        .map_err(|e| crate::CliError::Usage(format!("cannot write result: {e}")))?;
    writeln!(out)?;
    Ok(())
}

/// Plot-ready profile table: one row per prefix length k, with the
/// presentation-scaled statistic `sqrt(n) * ks` and the plain CUSUM
/// diagnostic; `critical` adds a constant horizontal-line column.
pub fn write_profile_csv(
    path: &Path,
    profile: &CusumProfile,
    critical: Option<f64>,
) -> CliResult<()> {
    let n = profile.n();
    let scale = (n as f64).sqrt();
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let mut header = String::from("k,s,ks,cvm,ks_scaled,cusum_plain");
    if critical.is_some() {
        header.push_str(",critical");
    }
    writeln!(out, "{header}")?;
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let mut row = format!(
            "{k},{s},{},{},{},{}",
            profile.ks[k],
            profile.cvm[k],
            scale * profile.ks[k],
            profile.plain[k]
        );
        if let Some(c) = critical {
            row.push_str(&format!(",{c}"));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Monte Carlo result table, one row per (n, s0) cell.
pub fn write_mse_csv(path: Option<&Path>, rows: &[McResult]) -> CliResult<()> {
    let mut out = open_sink(path)?;
    writeln!(out, "model,scenario,sigma,n,s0,reps,mse,bias,failures")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.dgp.model.name(),
            row.dgp.scenario.name(),
            row.dgp.sigma.label(),
            row.dgp.n,
            row.dgp.s0,
            row.replications,
            row.mse,
            row.bias,
            row.failures
        )?;
    }
    Ok(())
}

/// Cross-validation score table (h ascending).
pub fn write_bandwidth_csv(path: &Path, selection: &BandwidthSelection) -> CliResult<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "h,score")?;
    for (h, score) in &selection.cv_scores {
        writeln!(out, "{h},{score}")?;
    }
    Ok(())
}
