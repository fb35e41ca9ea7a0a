//! Adaptive Simpson quadrature for kernel moments and drift integrals.

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        // Richardson extrapolation of the composite estimate.
        left + right + delta / 15.0
    } else {
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::adaptive_simpson;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_polynomials() {
        let cube = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(cube, 4.0, epsilon = 1e-10);
        let quadratic = adaptive_simpson(|x| x * x, -1.0, 1.0, 1e-12);
        assert_abs_diff_eq!(quadratic, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn integrates_gaussian_density() {
        let two_pi = std::f64::consts::TAU;
        let mass = adaptive_simpson(
            |x| (-0.5 * x * x).exp() / two_pi.sqrt(),
            -10.0,
            10.0,
            1e-12,
        );
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(adaptive_simpson(|x| x, 3.0, 3.0, 1e-12), 0.0);
    }
}
