//! Compactly supported smoothing kernels with verified moment properties.
//!
//! All univariate families live on `[-1, 1]` and are rescaled to the support
//! half-width `C`; multivariate evaluation uses the product kernel
//! `K(u) = prod_j k(u_j / C) / C`, which is symmetric in each component and
//! integrates to one whenever the univariate family does.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Univariate kernel family.
///
/// `Epanechnikov4` is the fourth-order Epanechnikov kernel
/// `k(u) = (15/32)(3 - 10u^2 + 7u^4)` on `[-1, 1]`: its second moment
/// vanishes, at the price of negative lobes near the support boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Epanechnikov2,
    Epanechnikov4,
    Uniform,
}

impl KernelFamily {
    /// Resolves the CLI/config name of a family: `epa2`, `epa4` or `uniform`.
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "epa2" => Ok(Self::Epanechnikov2),
            "epa4" => Ok(Self::Epanechnikov4),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Config(format!(
                "unknown kernel family '{other}' (expected one of: epa2, epa4, uniform)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Epanechnikov2 => "epa2",
            Self::Epanechnikov4 => "epa4",
            Self::Uniform => "uniform",
        }
    }

    /// The univariate kernel on `[-1, 1]`; zero outside.
    #[inline]
    fn univariate(self, t: f64) -> f64 {
        if t.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Self::Epanechnikov2 => 0.75 * (1.0 - t * t),
            Self::Epanechnikov4 => {
                let t2 = t * t;
                15.0 / 32.0 * (3.0 - 10.0 * t2 + 7.0 * t2 * t2)
            }
            Self::Uniform => 0.5,
        }
    }
}

/// A product kernel: family, support half-width `C` and dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub support_c: f64,
    pub dimension: usize,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, support_c: f64, dimension: usize) -> Result<Self> {
        if !(support_c.is_finite() && support_c > 0.0) {
            return Err(Error::Config(format!(
                "kernel support half-width must be positive and finite, got {support_c}"
            )));
        }
        if dimension == 0 {
            return Err(Error::Config("kernel dimension must be at least 1".into()));
        }
        Ok(Self {
            family,
            support_c,
            dimension,
        })
    }

    /// Standard spec with support half-width 1; scaling is absorbed into the
    /// bandwidth by the smoothing layer.
    pub fn standard(family: KernelFamily, dimension: usize) -> Self {
        Self {
            family,
            support_c: 1.0,
            dimension,
        }
    }

    /// Evaluates the product kernel at `u`.
    ///
    /// Returns zero as soon as any component leaves `[-C, C]`. Non-finite
    /// components and a length mismatch are domain errors.
    pub fn evaluate(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dimension {
            return Err(Error::Domain(format!(
                "kernel argument has length {}, expected dimension {}",
                u.len(),
                self.dimension
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "kernel argument has a non-finite component".into(),
            ));
        }
        Ok(self.eval_unchecked(u))
    }

    /// Evaluation without argument checks, for validated inner loops.
    #[inline]
    pub(crate) fn eval_unchecked(&self, u: &[f64]) -> f64 {
        let c = self.support_c;
        let mut prod = 1.0;
        for &v in u {
            if v.abs() > c {
                return 0.0;
            }
            prod *= self.family.univariate(v / c) / c;
        }
        prod
    }

    /// Univariate factor `k(t) * inv_c` at pre-normalized `t`; the caller
    /// owns the support check and the scaling constants.
    #[inline]
    pub(crate) fn univariate_factor(&self, t: f64, inv_c: f64) -> f64 {
        self.family.univariate(t) * inv_c
    }
}

/// Numerically checked moments of the univariate (rescaled) kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    /// `integral of k` over `[-C, C]`.
    pub mass: f64,
    /// `integral of u * k(u)`; zero for every symmetric family.
    pub m1: f64,
    /// `integral of u^2 * k(u)`; near zero for the order-4 family.
    pub m2: f64,
}

/// Quadrature report of mass, first and second moment for `spec`'s
/// univariate factor on `[-C, C]`.
pub fn kernel_moment_report(spec: &KernelSpec) -> MomentReport {
    let c = spec.support_c;
    let k = |u: f64| spec.family.univariate(u / c) / c;
    let tol = 1e-12;
    MomentReport {
        mass: adaptive_simpson(k, -c, c, tol),
        m1: adaptive_simpson(|u| u * k(u), -c, c, tol),
        m2: adaptive_simpson(|u| u * u * k(u), -c, c, tol),
    }
}
