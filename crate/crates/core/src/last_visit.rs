//! Laplace transform of the time between the last visit to a lower point
//! `x` and the first hitting of an upper point `y > x`, together with the
//! two-sided splitting of the hitting probability of `{-a, a}` by which
//! point is reached first.
//!
//! The centering `a = (y-x)/2` maps `{x, y}` onto `{-a, a}`; all formulas
//! are written in those centered coordinates. `ρ^{±a}` below denotes the
//! hitting time of the two-point set on the event that the indicated point
//! is the one being hit.

use crate::engine::ScaleEngine;
use crate::error::{Error, Result};
use crate::math;

/// Which point of `{-a, a}` is reached first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstHit {
    Upper,
    Lower,
}

fn check_lambda(lam: f64) -> Result<f64> {
    if !(lam >= 0.0) || !lam.is_finite() {
        return Err(Error::Domain("the transform rate must be finite and >= 0"));
    }
    Ok(lam)
}

/// `E^z[e^{-λρ}; the indicated point is hit first]` for the two-point set
/// `{-a, a}`, as a function of the centered start `z`.
pub fn rho_laplace_split(
    engine: &ScaleEngine,
    a: f64,
    lam: f64,
    z: f64,
    first: FirstHit,
) -> Result<f64> {
    check_lambda(lam)?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain("the half-width must be finite and > 0"));
    }
    let phi = engine.phi(lam)?;
    match first {
        FirstHit::Upper => {
            if z <= -a {
                // From below the lower point the path must cross -a first.
                Ok(0.0)
            } else if z <= a {
                Ok(engine.w(lam, z + a)? / engine.w(lam, 2.0 * a)?)
            } else if phi == 0.0 {
                Ok((engine.w(lam, z + a)? - engine.w(lam, z - a)?) / engine.w(lam, 2.0 * a)?)
            } else {
                // W(z+a) − W(z−a)e^{Φ2a} rewritten through the tilt
                // remainder so the two growing exponentials cancel exactly.
                Ok((engine.tilt_remainder(lam, z - a)? * math::exp(phi * 2.0 * a)
                    - engine.tilt_remainder(lam, z + a)?)
                    / engine.w(lam, 2.0 * a)?)
            }
        }
        FirstHit::Lower => {
            if z <= -a {
                Ok(math::exp(phi * (a + z)))
            } else if z <= a {
                Ok(math::exp(phi * (z + a))
                    - engine.w(lam, z + a)? / engine.w(lam, 2.0 * a)?
                        * math::exp(phi * 2.0 * a))
            } else if phi == 0.0 {
                Ok(1.0
                    - engine.w(lam, z + a)? / engine.w(lam, 2.0 * a)?
                    - engine.w(lam, z - a)?
                        * (engine.phi_prime_inv(lam)? - 1.0 / engine.w(lam, 2.0 * a)?))
            } else {
                let e2 = math::exp(phi * 2.0 * a);
                let r_hi = engine.tilt_remainder(lam, z - a)?;
                let r_lo = engine.tilt_remainder(lam, z + a)?;
                Ok(e2 * engine.phi_prime_inv(lam)? * r_hi
                    - e2 / engine.w(lam, 2.0 * a)? * (r_hi * e2 - r_lo))
            }
        }
    }
}

/// `E^z[e^{-λ(T_y - g_x)}]`: the transform of the time elapsed between the
/// last visit to `x` and the first passage into `y`, started from `z`,
/// for `x < y`.
pub fn last_visit_laplace(
    engine: &ScaleEngine,
    lam: f64,
    z: f64,
    x: f64,
    y: f64,
) -> Result<f64> {
    check_lambda(lam)?;
    if !(x < y) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("the visited points must satisfy x < y"));
    }
    let a = 0.5 * (y - x);
    let z_rel = z - 0.5 * (x + y);
    let upper = rho_laplace_split(engine, a, lam, z_rel, FirstHit::Upper)?;
    let lower = rho_laplace_split(engine, a, 0.0, z_rel, FirstHit::Lower)?;
    if lower == 0.0 {
        return Ok(upper);
    }
    let phi0 = engine.phi_zero();
    // On the event that x is reached before y, the clock only starts at the
    // final departure from x; the remaining factor is the transform of an
    // excursion from x straight into y, a ratio of scale functions.
    let bridge = engine.w(0.0, y - x)? / engine.w(lam, y - x)? * math::exp(-phi0 * (y - x));
    Ok(upper + lower * bridge)
}

/// `E^x[L_∞]`, the expected total local time spent at `x` before the first
/// passage into `y > x` (local time normalized through rate-1 inverse).
pub fn expected_local_time(engine: &ScaleEngine, x: f64, y: f64) -> Result<f64> {
    if !(x < y) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain("the visited points must satisfy x < y"));
    }
    let phi0 = engine.phi_zero();
    Ok(engine.phi_prime_inv(1.0)? * engine.w(0.0, y - x)? * math::exp(-phi0 * (y - x)))
}
