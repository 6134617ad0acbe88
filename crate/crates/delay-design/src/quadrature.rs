//! Adaptive Simpson quadrature.
//!
//! The integrands here are piecewise smooth (triangular kinks, Gaussian
//! tails), so recursive Simpson refinement with an absolute tolerance and a
//! generous depth cap is enough.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("quadrature failed to converge on [{a}, {b}]")]
    NoConvergence { a: f64, b: f64 },
}

const MAX_DEPTH: usize = 60;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, QuadratureError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol || (b - a).abs() < 1e-300 {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(QuadratureError::NoConvergence { a, b });
    }
    let l = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integrate with known interior breakpoints (kinks); each smooth piece is
/// handled separately so the adaptive refinement never straddles a kink.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: f64,
) -> Result<f64, QuadratureError> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let pieces = cuts.len() - 1;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(&f, w[0], w[1], tol / pieces as f64)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn kinked_integrand() {
        // |x| over [-1, 2] = 0.5 + 2 = 2.5
        let v = integrate_piecewise(|x: f64| x.abs(), -1.0, 2.0, &[0.0], 1e-12).unwrap();
        assert!((v - 2.5).abs() < 1e-10);
    }

    #[test]
    fn gaussian_mass() {
        let sigma: f64 = 0.3;
        let f = |x: f64| (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let v = integrate(f, -10.0 * sigma, 10.0 * sigma, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }
}
