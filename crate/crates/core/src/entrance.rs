//! Laplace transforms of the excursion entrance laws from `V = {-a, a}`
//! and the excursion-measure Laplace functionals they are normalized by.
//!
//! `η̂^{±a}_β` is the `β`-Laplace transform (in time) of the entrance law
//! of the excursion measure attached to the point `±a`; the normalization
//! is fixed by the local times at rate 1, which is why the constants
//! `W^(1)(2a)`, `Φ'(1)`, `e^{Φ(1)2a}` appear. The lower point has, when
//! the Gaussian coefficient is positive, a decomposition of its excursion
//! measure into excursions starting downward (by creeping) and upward; the
//! downward part carries the factor `σ²/2` (the Gaussian coefficient of
//! `ψ(λ) = ½σ²λ² + …`).
//!
//! For the upper point no tractable expression is known unless `σ = 0`;
//! that case is reported as unsupported rather than approximated.

use crate::engine::ScaleEngine;
use crate::error::{Error, Result};
use crate::killed::{self, Boundary, TwoPointConfig};
use crate::math;

/// Which point of `V` the excursion measure is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The lower point `-a`.
    Minus,
    /// The upper point `a`.
    Plus,
}

/// Which part of the lower-point excursion measure is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Total,
    /// Excursions starting with an immediate passage below `-a` (creeping
    /// down; present only when `σ > 0`).
    DownStart,
    /// Excursions starting with an immediate passage above `-a`.
    UpStart,
}

/// A query for the entrance-law density `dη̂^{±a}_β/dy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntranceQuery {
    pub beta: f64,
    pub y: f64,
    pub side: Side,
    pub part: Part,
}

fn check_rate(q: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain("rate must be finite and > 0"));
    }
    Ok(())
}

/// `W^(1)(2a)/(e^{Φ(1)2a}−1)`, the lower-point normalization constant.
fn minus_norm(engine: &ScaleEngine, a: f64) -> Result<f64> {
    let phi1 = engine.phi(1.0)?;
    Ok(engine.w(1.0, 2.0 * a)? / math::expm1(phi1 * 2.0 * a))
}

/// The Laplace-transformed entrance-law density.
pub fn entrance_density(
    engine: &ScaleEngine,
    cfg: &TwoPointConfig,
    query: &EntranceQuery,
) -> Result<f64> {
    check_rate(query.beta)?;
    let a = cfg.half_width();
    let beta = query.beta;
    let y = query.y;
    match query.side {
        Side::Minus => {
            let norm = minus_norm(engine, a)?;
            let down = || -> Result<f64> {
                let gauss = 0.5 * engine.model().sigma() * engine.model().sigma();
                Ok(gauss * norm * engine.creep_kernel(beta, -a - y)?)
            };
            let total = || -> Result<f64> {
                Ok(norm * killed::two_sided_kernel(engine, beta, a, y)?
                    / engine.w(beta, 2.0 * a)?)
            };
            match query.part {
                Part::Total => total(),
                Part::DownStart => down(),
                Part::UpStart => Ok(total()? - down()?),
            }
        }
        Side::Plus => {
            if engine.model().sigma() > 0.0 {
                return Err(Error::Unsupported(
                    "entrance law for the upper point with sigma > 0 is not available \
                     (no tractable expression known)",
                ));
            }
            if query.part != Part::Total {
                return Err(Error::Domain(
                    "the upward/downward split applies to the lower point only",
                ));
            }
            let alpha_up = killed::alpha(engine, cfg, 1.0, Boundary::Upper)?;
            if !(alpha_up > 0.0) {
                return Err(Error::NumericalFault("upper local-time weight came out nonpositive"));
            }
            let bracket = crate::conditioned::down_to_a_numerator(engine, a, beta, y)?;
            Ok(engine.phi_prime(1.0)? / alpha_up * bracket)
        }
    }
}

/// `P̂^{±a}[1 − e^{−qρ}]`, the excursion-measure Laplace functional.
pub fn excursion_laplace(
    engine: &ScaleEngine,
    cfg: &TwoPointConfig,
    q: f64,
    side: Side,
) -> Result<f64> {
    check_rate(q)?;
    let a = cfg.half_width();
    match side {
        Side::Minus => {
            let phi_q = engine.phi(q)?;
            let phi_1 = engine.phi(1.0)?;
            Ok(math::expm1(phi_q * 2.0 * a) / math::expm1(phi_1 * 2.0 * a)
                * engine.w(1.0, 2.0 * a)?
                / engine.w(q, 2.0 * a)?)
        }
        Side::Plus => {
            let term = |r: f64| -> Result<f64> {
                let phi = engine.phi(r)?;
                Ok(math::exp(phi * 2.0 * a)
                    * (engine.phi_prime_inv(r)?
                        - math::expm1(phi * 2.0 * a) / engine.w(r, 2.0 * a)?))
            };
            Ok(term(q)? / term(1.0)?)
        }
    }
}

/// The split of the lower-point functional by how the excursion starts.
pub fn excursion_laplace_split(
    engine: &ScaleEngine,
    cfg: &TwoPointConfig,
    q: f64,
    part: Part,
) -> Result<f64> {
    check_rate(q)?;
    let a = cfg.half_width();
    let norm = minus_norm(engine, a)?;
    let gauss = 0.5 * engine.model().sigma() * engine.model().sigma();
    let phi_q = engine.phi(q)?;
    let down = norm * gauss * phi_q;
    match part {
        Part::Total => excursion_laplace(engine, cfg, q, Side::Minus),
        Part::DownStart => Ok(down),
        Part::UpStart => {
            Ok(norm * math::expm1(phi_q * 2.0 * a) / engine.w(q, 2.0 * a)? - down)
        }
    }
}
