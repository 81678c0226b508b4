//! Thin wrappers over `libm` so the rest of the crate stays `no_std`.

#[allow(unused_imports)]
pub use libm::{atan, cos, cosh, exp, expm1, fabs, log, log1p, pow, sin, sinh, sqrt, tan, tgamma};

use core::f64::consts::PI;

/// Reciprocal gamma `1/Γ(w)` for any real `w`, including nonpositive
/// arguments (where it vanishes at the poles of `Γ`).
pub fn rgamma(w: f64) -> f64 {
    if w > 0.5 {
        1.0 / tgamma(w)
    } else {
        // reflection: 1/Γ(w) = Γ(1-w) sin(πw) / π, with the sine reduced
        // around the nearest integer so it vanishes exactly at the poles.
        let n = libm::round(w);
        let r = w - n;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        sign * sin(PI * r) * tgamma(1.0 - w) / PI
    }
}
