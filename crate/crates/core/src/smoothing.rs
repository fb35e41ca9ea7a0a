//! Nadaraya-Watson regression, leave-one-out cross-validation bandwidth
//! selection and the box trimming weight.
//!
//! Predictions come back as `(value, valid)` pairs: with order-4 kernels the
//! NW denominator can vanish or turn negative, in which case the point is
//! flagged invalid and treated as trimmed downstream.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Absolute denominator threshold below which an NW prediction is invalid.
pub const NW_DENOM_EPS: f64 = 1e-10;

/// Observed data: `n` responses with `d`-dimensional covariates, in time
/// order, plus optional display labels (e.g. years).
///
/// Observation order is meaningful and is never changed on ingest.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    x: Vec<f64>, // row-major n x d
    y: Vec<f64>,
    dim: usize,
    time_labels: Option<Vec<String>>,
}

impl Sample {
    /// Builds a sample from a row-major covariate matrix and responses.
    pub fn new(x: Vec<f64>, dim: usize, y: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Data("covariate dimension must be at least 1".into()));
        }
        let n = y.len();
        if n < 2 {
            return Err(Error::Data(format!(
                "a sample needs at least 2 observations, got {n}"
            )));
        }
        if x.len() != n * dim {
            return Err(Error::Data(format!(
                "covariate matrix has {} entries, expected {} ({} rows x {} columns)",
                x.len(),
                n * dim,
                n,
                dim
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Data("sample contains non-finite values".into()));
        }
        Ok(Self {
            x,
            y,
            dim,
            time_labels: None,
        })
    }

    /// Convenience constructor for one-dimensional covariates.
    pub fn univariate(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(x, 1, y)
    }

    /// Attaches one display label per observation.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Data(format!(
                "{} labels for {} observations",
                labels.len(),
                self.len()
            )));
        }
        self.time_labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major `n x d` covariate matrix.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn x_row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.time_labels.as_deref()
    }

    /// Sample standard deviation (1/(n-1) normalization) of covariate
    /// column `j`.
    pub fn column_std(&self, j: usize) -> f64 {
        let n = self.len();
        let mean = (0..n).map(|i| self.x[i * self.dim + j]).sum::<f64>() / n as f64;
        let ssq = (0..n)
            .map(|i| {
                let d = self.x[i * self.dim + j] - mean;
                d * d
            })
            .sum::<f64>();
        (ssq / (n - 1) as f64).sqrt()
    }
}

/// Trimming region for residual sums: either no trimming or the box
/// `[-c_1, c_1] x ... x [-c_d, c_d]`.
#[derive(Debug, Clone, PartialEq)]
pub enum TrimRegion {
    None,
    Box { half_widths: Vec<f64> },
}

impl TrimRegion {
    pub fn none() -> Self {
        TrimRegion::None
    }

    /// Box with the same half-width in every dimension.
    pub fn uniform_box(c: f64, dim: usize) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Config(format!(
                "trim half-width must be positive and finite, got {c}"
            )));
        }
        Ok(TrimRegion::Box {
            half_widths: vec![c; dim],
        })
    }

    pub fn from_half_widths(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() || half_widths.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::Config(
                "trim half-widths must be positive and finite".into(),
            ));
        }
        Ok(TrimRegion::Box { half_widths })
    }

    /// The trimming weight: 1 inside the region, 0 outside.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            TrimRegion::None => true,
            TrimRegion::Box { half_widths } => x
                .iter()
                .zip(half_widths)
                .all(|(v, c)| v.abs() <= *c),
        }
    }
}

/// Default trimming box: half-width `s_j * (log n)^(1/d)` per dimension,
/// where `s_j` is the sample standard deviation of column `j`. The region
/// grows at the prescribed logarithmic rate while adapting to scale.
pub fn default_trim(sample: &Sample) -> Result<TrimRegion> {
    let d = sample.dim();
    let growth = (sample.len() as f64).ln().powf(1.0 / d as f64);
    let mut half_widths = Vec::with_capacity(d);
    for j in 0..d {
        let s = sample.column_std(j);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Config(format!(
                "covariate dimension {j} has zero variance; no default trim region exists"
            )));
        }
        half_widths.push(s * growth);
    }
    Ok(TrimRegion::Box { half_widths })
}

/// One Nadaraya-Watson prediction. When `valid` is false the denominator
/// was below [`NW_DENOM_EPS`] in absolute value and `value` must not be
/// consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NwFit {
    pub value: f64,
    pub valid: bool,
}

#[inline]
fn nw_point(
    sample: &Sample,
    kernel: &KernelSpec,
    h: f64,
    query: &[f64],
    leave_out: Option<usize>,
    denom_eps: f64,
) -> NwFit {
    let d = sample.dim();
    let mut num = 0.0;
    let mut den = 0.0;
    if d == 1 {
        // Hot path: skip out-of-support points with one multiply-compare
        // instead of a division per pair.
        let q = query[0];
        let xs = sample.x();
        let ys = sample.y();
        let cutoff = kernel.support_c * h;
        let inv_hc = 1.0 / (h * kernel.support_c);
        let inv_c = 1.0 / kernel.support_c;
        for j in 0..xs.len() {
            if Some(j) == leave_out {
                continue;
            }
            let diff = q - xs[j];
            if diff.abs() > cutoff {
                continue;
            }
            let w = kernel.univariate_factor(diff * inv_hc, inv_c);
            num += w * ys[j];
            den += w;
        }
    } else {
        let mut u = [0.0f64; 8];
        let mut u_heap;
        let ubuf: &mut [f64] = if d <= 8 {
            &mut u[..d]
        } else {
            u_heap = vec![0.0; d];
            &mut u_heap
        };
        for j in 0..sample.len() {
            if Some(j) == leave_out {
                continue;
            }
            let row = sample.x_row(j);
            for l in 0..d {
                ubuf[l] = (query[l] - row[l]) / h;
            }
            let w = kernel.eval_unchecked(ubuf);
            if w != 0.0 {
                num += w * sample.y()[j];
                den += w;
            }
        }
    }
    if den.abs() < denom_eps {
        NwFit {
            value: f64::NAN,
            valid: false,
        }
    } else {
        NwFit {
            value: num / den,
            valid: true,
        }
    }
}

fn check_nw_args(sample: &Sample, kernel: &KernelSpec, h: f64, query: &[f64]) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Config(format!(
            "bandwidth must be positive and finite, got {h}"
        )));
    }
    if kernel.dimension != sample.dim() {
        return Err(Error::Config(format!(
            "kernel dimension {} does not match sample dimension {}",
            kernel.dimension,
            sample.dim()
        )));
    }
    if query.len() % sample.dim() != 0 {
        return Err(Error::Data(format!(
            "query matrix length {} is not a multiple of dimension {}",
            query.len(),
            sample.dim()
        )));
    }
    if query.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("query points must be finite".into()));
    }
    Ok(())
}

/// Nadaraya-Watson predictions at `query` (row-major `m x d`), optionally
/// excluding sample index `leave_out` from both sums.
pub fn nw_predict(
    sample: &Sample,
    kernel: &KernelSpec,
    h: f64,
    query: &[f64],
    leave_out: Option<usize>,
) -> Result<Vec<NwFit>> {
    nw_predict_with_eps(sample, kernel, h, query, leave_out, NW_DENOM_EPS)
}

/// [`nw_predict`] with an explicit denominator threshold. Shrinking the
/// threshold can only turn invalid predictions valid; values of already
/// valid points are unchanged.
pub fn nw_predict_with_eps(
    sample: &Sample,
    kernel: &KernelSpec,
    h: f64,
    query: &[f64],
    leave_out: Option<usize>,
    denom_eps: f64,
) -> Result<Vec<NwFit>> {
    check_nw_args(sample, kernel, h, query)?;
    if let Some(i) = leave_out {
        if i >= sample.len() {
            return Err(Error::Data(format!(
                "leave-out index {i} out of range for {} observations",
                sample.len()
            )));
        }
    }
    let d = sample.dim();
    let fits = query
        .chunks_exact(d)
        .map(|q| nw_point(sample, kernel, h, q, leave_out, denom_eps))
        .collect();
    Ok(fits)
}

/// Leave-one-out cross-validation score for bandwidth `h`: the mean squared
/// residual over trim-region points with a valid leave-one-out prediction.
///
/// Returns `+inf` when fewer than `max(5, 0.1 n)` points are usable, so that
/// degenerate bandwidths lose every comparison.
pub fn loocv_score(
    sample: &Sample,
    kernel: &KernelSpec,
    h: f64,
    trim: &TrimRegion,
) -> Result<f64> {
    check_nw_args(sample, kernel, h, &[])?;
    let n = sample.len();
    let mut sse = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        if !trim.contains(sample.x_row(i)) {
            continue;
        }
        let fit = nw_point(sample, kernel, h, sample.x_row(i), Some(i), NW_DENOM_EPS);
        if fit.valid {
            let r = sample.y()[i] - fit.value;
            sse += r * r;
            count += 1;
        }
    }
    let min_points = 5.0_f64.max(0.1 * n as f64);
    if (count as f64) < min_points {
        Ok(f64::INFINITY)
    } else {
        Ok(sse / count as f64)
    }
}

/// A selected bandwidth together with the full CV score table.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthSelection {
    pub h: f64,
    pub cv_scores: Vec<(f64, f64)>,
}

/// Default CV grid: 20 log-spaced bandwidths on `[h0/4, 4 h0]` around the
/// Silverman pilot `h0 = 1.06 s_x n^(-1/5)`, with `s_x` averaged over
/// covariate columns.
pub fn default_bandwidth_grid(sample: &Sample) -> Result<Vec<f64>> {
    let d = sample.dim();
    let mut s = 0.0;
    for j in 0..d {
        let sj = sample.column_std(j);
        if !(sj.is_finite() && sj > 0.0) {
            return Err(Error::Config(format!(
                "covariate dimension {j} has zero variance; cannot build a bandwidth grid"
            )));
        }
        s += sj;
    }
    s /= d as f64;
    let h0 = 1.06 * s * (sample.len() as f64).powf(-0.2);
    let (lo, hi) = ((0.25 * h0).ln(), (4.0 * h0).ln());
    let points = 20;
    Ok((0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect())
}

/// Minimizes the LOOCV score over a bandwidth grid, breaking ties toward
/// the smaller bandwidth. With no grid (or an empty one) the default grid
/// is used.
pub fn select_bandwidth(
    sample: &Sample,
    kernel: &KernelSpec,
    trim: &TrimRegion,
    grid: Option<&[f64]>,
) -> Result<BandwidthSelection> {
    let mut candidates = match grid {
        Some(g) if !g.is_empty() => g.to_vec(),
        _ => default_bandwidth_grid(sample)?,
    };
    if candidates.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::Config(
            "bandwidth grid entries must be positive and finite".into(),
        ));
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite bandwidths"));

    let cv_scores: Vec<(f64, f64)> = candidates
        .par_iter()
        .map(|&h| loocv_score(sample, kernel, h, trim).map(|score| (h, score)))
        .collect::<Result<_>>()?;

    let mut best: Option<(f64, f64)> = None;
    for &(h, score) in &cv_scores {
        if score.is_finite() && best.map_or(true, |(_, s)| score < s) {
            best = Some((h, score));
        }
    }
    match best {
        Some((h, _)) => Ok(BandwidthSelection { h, cv_scores }),
        None => Err(Error::Estimation("bandwidth selection failed".into())),
    }
}
