//! Shared helpers for the integration tests.
//!
//! The regularization oracle tests cross-check the closed-form antiderivative
//! and the junction smoothness of the regularized logarithm with numerics
//! that are independent of the library implementation: adaptive Simpson
//! quadrature and one-sided finite-difference derivatives.

#![allow(dead_code)] // each test target uses a subset of these helpers

/// Exact binomial coefficient C(m, i) as f64 (exact for m ≤ 20).
pub fn binomial(m: u32, i: u32) -> f64 {
    assert!(i <= m && m <= 20);
    let mut c: u64 = 1;
    for j in 0..i as u64 {
        c = c * (m as u64 - j) / (j + 1);
    }
    c as f64
}

/// m-th one-sided finite-difference derivative of `g` at 0 with step `d`.
///
/// A positive `d` differences forward over the nodes `0, d, …, m·d`; a
/// negative `d` differences backward. For m = 0 this is simply `g(d)`,
/// which lets the same ratio test cover plain continuity of the value.
pub fn one_sided_derivative(g: &dyn Fn(f64) -> f64, m: u32, d: f64) -> f64 {
    if m == 0 {
        return g(d);
    }
    let mut acc = 0.0;
    for i in 0..=m {
        let sign = if (m - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += sign * binomial(m, i) * g(i as f64 * d);
    }
    acc / d.powi(m as i32)
}

/// Mismatch between the forward and backward m-th one-sided derivatives of
/// `g` at 0, both taken with absolute step `d`.
pub fn junction_mismatch(g: &dyn Fn(f64) -> f64, m: u32, d: f64) -> f64 {
    (one_sided_derivative(g, m, d) - one_sided_derivative(g, m, -d)).abs()
}

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute
/// tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    adaptive_step(f, a, fa, b, fb, fm, whole, tol, 48)
}

/// Integral of the regularized logarithm over `[0, rho]`, by quadrature
/// split at the branch junction so each piece is smooth. The tolerance is
/// relative to a first-pass estimate of each piece.
pub fn quad_reg_log_integral(reg: &logse::logreg::RegularizationParams, rho: f64) -> f64 {
    let f = |s: f64| logse::logreg::reg_log(s, reg).unwrap();
    let cutoff = reg.density_cutoff();
    let piece = |a: f64, b: f64| -> f64 {
        if a == b {
            return 0.0;
        }
        // Two-pass tolerance: rough value first, then integrate to a
        // relative 1e-12 of it (floored to dodge zero estimates).
        let rough = adaptive_simpson(&f, a, b, 1e-8).abs();
        adaptive_simpson(&f, a, b, 1e-12 * rough.max(1e-30))
    };
    if rho <= cutoff {
        piece(0.0, rho)
    } else {
        piece(0.0, cutoff) + piece(cutoff, rho)
    }
}
