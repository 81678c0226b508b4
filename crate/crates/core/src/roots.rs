//! Safeguarded Newton iteration on a bracket.

use crate::error::{Error, Result};

/// Solves `f(x) = target` for an increasing differentiable `f` on `[lo, hi]`,
/// given that `f(lo) <= target <= f(hi)`. `f` returns the pair
/// `(value, derivative)`. Newton steps that leave the current bracket are
/// replaced by bisection, so convergence is guaranteed; termination is on
/// bracket width relative to the iterate.
pub fn bracketed_newton(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    target: f64,
) -> Result<f64> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if !(flo <= target && target <= fhi) {
        return Err(Error::NumericalFault("root bracket does not straddle the target"));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = f(x);
        if v == target {
            return Ok(x);
        }
        if v < target {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - (v - target) / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * (libm::fabs(x) + f64::MIN_POSITIVE) {
            return Ok(x);
        }
    }
    Ok(x)
}
