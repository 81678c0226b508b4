//! Adaptive Simpson quadrature.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    // Floor below which the discrepancy is indistinguishable from rounding
    // noise in the integrand values; subdividing past it never converges
    // because the requested tolerance halves faster than the noise shrinks.
    let noise = 2e-13
        * (b - a)
        * (math::fabs(fa) + math::fabs(flm) + math::fabs(fm) + math::fabs(frm) + math::fabs(fb));
    if math::fabs(err) <= 15.0 * tol
        || math::fabs(err) <= noise
        || b - a < 1e-14 * (math::fabs(a) + math::fabs(b) + 1.0)
    {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::Accuracy {
            message: "adaptive quadrature exceeded its subdivision depth",
            estimate: math::fabs(err),
        });
    }
    let l = adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(b >= a) {
        return Err(Error::Domain("integration bounds must satisfy a <= b"));
    }
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Integrates `f` over `[points[0], points[last]]`, forcing subdivision at
/// each interior breakpoint (kinks, branch switches of the integrand).
pub fn integrate_with_breakpoints(
    f: impl Fn(f64) -> f64,
    points: &[f64],
    tol: f64,
) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two breakpoints"));
    }
    let per = tol / (points.len() - 1) as f64;
    let mut total = 0.0;
    for w in points.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], per)?;
    }
    Ok(total)
}

/// Integrates `f` over `[a, ∞)` by adding dyadically growing panels until a
/// panel contributes less than `tol` (so the integrand must eventually
/// decay). Returns the sum of panel integrals.
pub fn tail_integral(f: impl Fn(f64) -> f64, a: f64, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = a;
    let mut width = 1.0;
    for _ in 0..64 {
        let part = adaptive_simpson(&f, lo, lo + width, tol * 0.1)?;
        total += part;
        if math::fabs(part) < tol && width >= 8.0 {
            return Ok(total);
        }
        lo += width;
        width *= 2.0;
    }
    Err(Error::Accuracy {
        message: "semi-infinite integral did not settle",
        estimate: f64::NAN,
    })
}

/// Sample points of a uniform grid over `[lo, hi]` with `n` panels
/// (`n + 1` points including both ends).
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        pts.push(lo + (hi - lo) * i as f64 / n as f64);
    }
    pts
}
