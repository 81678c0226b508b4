//! Resolvent of the process killed on hitting the two-point set
//! `V = {-a, a}`, together with the one- and two-sided potential densities
//! and exit functionals it is assembled from.
//!
//! Notation: `T_z` is the first hitting time of the point `z`, `τ_z^±` the
//! first passage times above/below level `z`, `ρ = T_{-a} ∧ T_a` the first
//! hitting time of `V`, and `e_q` an independent exponential time of rate
//! `q`. The main objects are
//!
//! * `v(q, x, y)` — the density of `∫_0^ρ e^{-qt} P^x(X_t ∈ dy) dt`,
//! * `h(q, x) = P^x(ρ > e_q)` — the avoidance probability, and
//! * `alpha(q, ·)` — the local-time weights attached to the two points.
//!
//! Formulas combining `W^(q)` with exponentials `e^{Φ(q)(·)}` suffer
//! catastrophic cancellation far below `-a` (both terms grow like
//! `e^{Φ(q)|y|}` while the value decays); every such combination is
//! rewritten through the engine's tilt remainder `r_q`, which subtracts
//! the growing parts exactly.

use crate::engine::ScaleEngine;
use crate::error::{Error, Result};
use crate::math;

/// The two-point set `V = {-a, a}` via its half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointConfig {
    half_width: f64,
}

impl TwoPointConfig {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter("half-width a must be finite and > 0"));
        }
        Ok(TwoPointConfig { half_width: a })
    }

    /// The half-width `a`, so that `V = {-a, a}`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

fn check_positive_rate(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain("rate q must be finite and > 0"));
    }
    Ok(())
}

/// Potential density of the process killed on exiting `[c, b]`:
/// `1_{[c,b]}(y)·(W^(q)(z−c)W^(q)(b−y)/W^(q)(b−c) − W^(q)(z−y))`.
pub fn potential_density_interval(
    engine: &ScaleEngine,
    q: f64,
    c: f64,
    b: f64,
    z: f64,
    y: f64,
) -> Result<f64> {
    check_positive_rate(q)?;
    if !(c < b) {
        return Err(Error::Domain("interval needs c < b"));
    }
    if !(c <= z && z <= b) {
        return Err(Error::Domain("starting point z must lie in [c, b]"));
    }
    if y < c || y > b {
        return Ok(0.0);
    }
    Ok(engine.w(q, z - c)? * engine.w(q, b - y)? / engine.w(q, b - c)? - engine.w(q, z - y)?)
}

/// Potential density of the process killed on passing below `c`:
/// `1_{[c,∞)}(y)·(W^(q)(z−c)e^{Φ(q)(c−y)} − W^(q)(z−y))`.
pub fn potential_density_above(
    engine: &ScaleEngine,
    q: f64,
    c: f64,
    z: f64,
    y: f64,
) -> Result<f64> {
    check_positive_rate(q)?;
    if !(z >= c) {
        return Err(Error::Domain("starting point z must satisfy z >= c"));
    }
    if y < c {
        return Ok(0.0);
    }
    let phi = engine.phi(q)?;
    Ok(engine.w(q, z - c)? * math::exp(phi * (c - y)) - engine.w(q, z - y)?)
}

/// Potential density of the process killed on hitting the point `b` from
/// below: `1_{(−∞,b]}(y)·(W^(q)(b−y)e^{Φ(q)(z−b)} − W^(q)(z−y))`.
///
/// For `y` far below both `z` and `b` the direct difference cancels
/// catastrophically; it equals `r_q(z−y) − r_q(b−y)e^{Φ(q)(z−b)}` in terms
/// of the tilt remainder, which is used whenever both `W`-arguments are
/// positive.
pub fn potential_density_hit_level(
    engine: &ScaleEngine,
    q: f64,
    b: f64,
    z: f64,
    y: f64,
) -> Result<f64> {
    check_positive_rate(q)?;
    if !(z <= b) {
        return Err(Error::Domain("starting point z must satisfy z <= b"));
    }
    if y > b {
        return Ok(0.0);
    }
    let phi = engine.phi(q)?;
    if y >= z {
        return Ok(engine.w(q, b - y)? * math::exp(phi * (z - b)));
    }
    Ok(engine.tilt_remainder(q, z - y)?
        - engine.tilt_remainder(q, b - y)? * math::exp(phi * (z - b)))
}

/// `E^z[e^{−qτ₀⁻ + Φ(q)X_{τ₀⁻}}; τ₀⁻ < τ_b⁺]` with the lower barrier at 0
/// (the caller shifts coordinates): `e^{Φ(q)z} − (W^(q)(z)/W^(q)(b))e^{Φ(q)b}`,
/// and `e^{Φ(q)z} − W^(q)(z)/Φ'(q)` when `b` is `None` (no upper barrier).
pub fn exit_exp_functional(engine: &ScaleEngine, q: f64, z: f64, b: Option<f64>) -> Result<f64> {
    check_positive_rate(q)?;
    match b {
        None => Ok(engine.phi_prime_inv(q)? * engine.tilt_remainder(q, z)?),
        Some(b) => {
            if !(z <= b) {
                return Err(Error::Domain("z must not exceed the upper barrier b"));
            }
            let phi = engine.phi(q)?;
            let wb = engine.w(q, b)?;
            // e^{Φz}(1 − Φ'e^{Φb}/W(b)) + r(z)e^{Φb}/W(b): growing parts of
            // the naive difference cancelled exactly.
            let ratio = math::exp(phi * b) / wb;
            Ok(math::exp(phi * z) * (1.0 - engine.phi_prime(q)? * ratio)
                + engine.tilt_remainder(q, z)? * ratio)
        }
    }
}

/// `E^z[W^(q)(X_{τ_c⁻})e^{−qτ_c⁻}; τ_c⁻ < τ_b⁺]`:
/// `W^(q)(z) − (W^(q)(z−c)/W^(q)(b−c))W^(q)(b)`, and
/// `W^(q)(z) − W^(q)(z−c)e^{Φ(q)c}` when `b` is `None`.
pub fn exit_scale_functional(
    engine: &ScaleEngine,
    q: f64,
    z: f64,
    c: f64,
    b: Option<f64>,
) -> Result<f64> {
    check_positive_rate(q)?;
    match b {
        None => {
            let phi = engine.phi(q)?;
            // = r(z−c)e^{Φc} − r(z).
            Ok(engine.tilt_remainder(q, z - c)? * math::exp(phi * c)
                - engine.tilt_remainder(q, z)?)
        }
        Some(b) => {
            if !(c < b) {
                return Err(Error::Domain("barriers must satisfy c < b"));
            }
            if !(z <= b) {
                return Err(Error::Domain("z must not exceed the upper barrier b"));
            }
            Ok(engine.w(q, z)? - engine.w(q, z - c)? / engine.w(q, b - c)? * engine.w(q, b)?)
        }
    }
}

/// `W^(q)(a−y) − W^(q)(−a−y)e^{Φ(q)2a}` — the two-sided kernel shared by
/// several formulas; evaluated through tilt remainders when `y < -a`.
pub(crate) fn two_sided_kernel(
    engine: &ScaleEngine,
    q: f64,
    a: f64,
    y: f64,
) -> Result<f64> {
    if y > -a {
        return engine.w(q, a - y);
    }
    let phi = engine.phi(q)?;
    Ok(engine.tilt_remainder(q, -a - y)? * math::exp(phi * 2.0 * a)
        - engine.tilt_remainder(q, a - y)?)
}

/// `W^(q)(−a−y)e^{Φ(q)(x+a)} − W^(q)(x−y)`, the `x ≤ −a` branch of the
/// killed resolvent (and the trailing pair of the other branches).
fn lower_kernel(engine: &ScaleEngine, q: f64, a: f64, x: f64, y: f64) -> Result<f64> {
    if y >= -a {
        // First term vanishes; at most one term alive.
        return Ok(-engine.w(q, x - y)?);
    }
    let phi = engine.phi(q)?;
    Ok(engine.tilt_remainder(q, x - y)?
        - engine.tilt_remainder(q, -a - y)? * math::exp(phi * (x + a)))
}

/// Resolvent density `v_q(x, y)` of the process killed on hitting `V`.
pub fn v(engine: &ScaleEngine, cfg: &TwoPointConfig, q: f64, x: f64, y: f64) -> Result<f64> {
    check_positive_rate(q)?;
    let a = cfg.half_width();
    let mut value = lower_kernel(engine, q, a, x, y)?;
    if x > -a {
        value += engine.w(q, x + a)? / engine.w(q, 2.0 * a)? * two_sided_kernel(engine, q, a, y)?;
    }
    if x > a {
        // Bracket multiplying W^(q)(x−a)e^{Φ(q)2a} in the general branch:
        // e^{Φ(−a−y)} − W(a−y)/W(2a) − W(−a−y)(Φ'(q)^{-1} − e^{Φ2a}/W(2a)),
        // regrouped as Φ'(q)^{-1} r(−a−y) − kernel/W(2a).
        let w2a = engine.w(q, 2.0 * a)?;
        let phi = engine.phi(q)?;
        let bracket = engine.phi_prime_inv(q)? * engine.tilt_remainder(q, -a - y)?
            - two_sided_kernel(engine, q, a, y)? / w2a;
        value += engine.w(q, x - a)? * math::exp(phi * 2.0 * a) * bracket;
    }
    Ok(value)
}

/// Avoidance probability `h_q(x) = P^x(ρ > e_q)`.
pub fn h(engine: &ScaleEngine, cfg: &TwoPointConfig, q: f64, x: f64) -> Result<f64> {
    check_positive_rate(q)?;
    let a = cfg.half_width();
    let phi = engine.phi(q)?;
    if x <= -a {
        return Ok(-math::expm1(phi * (a + x)));
    }
    let w2a = engine.w(q, 2.0 * a)?;
    let em1 = math::expm1(phi * 2.0 * a);
    if x <= a {
        // 1 − e^{Φ(a+x)} + W(x+a)(e^{Φ2a}−1)/W(2a), regrouped so the two
        // e^{Φ(a+x)}-sized terms cancel exactly:
        // 1 − α_a(q)e^{Φ(x−a)} − r(x+a)(e^{Φ2a}−1)/W(2a).
        let upper = alpha(engine, cfg, q, Boundary::Upper)?;
        return Ok(1.0
            - upper * math::exp(phi * (x - a))
            - engine.tilt_remainder(q, x + a)? * em1 / w2a);
    }
    // x > a: 1 + (r(x−a)e^{Φ2a} − r(x+a))(e^{Φ2a}−1)/W(2a)
    //          − Φ'(q)^{-1} r(x−a) e^{Φ2a}.
    let e2a = math::exp(phi * 2.0 * a);
    let r_lo = engine.tilt_remainder(q, x - a)?;
    let r_hi = engine.tilt_remainder(q, x + a)?;
    Ok(1.0 + (r_lo * e2a - r_hi) * em1 / w2a - engine.phi_prime_inv(q)? * r_lo * e2a)
}

/// Which point of `V` a local-time weight refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// The point `a`.
    Upper,
    /// The point `-a`.
    Lower,
}

/// The local-time weights
/// `α_a(q) = e^{Φ(q)2a}(1 − (Φ'(q)/W^(q)(2a))(e^{Φ(q)2a}−1))` and
/// `α_{−a}(q) = (Φ'(q)/W^(q)(2a))(e^{Φ(q)2a}−1)`.
pub fn alpha(engine: &ScaleEngine, cfg: &TwoPointConfig, q: f64, which: Boundary) -> Result<f64> {
    check_positive_rate(q)?;
    let a = cfg.half_width();
    let phi = engine.phi(q)?;
    let lower = engine.phi_prime(q)? / engine.w(q, 2.0 * a)? * math::expm1(phi * 2.0 * a);
    match which {
        Boundary::Lower => Ok(lower),
        Boundary::Upper => Ok(math::exp(phi * 2.0 * a) * (1.0 - lower)),
    }
}
