//! Fluctuation identities for spectrally negative Lévy processes around a
//! two-point set.
//!
//! The crate evaluates, for a spectrally negative Lévy process `X` with
//! Laplace exponent `ψ`, the classical fluctuation quantities `Φ(q)`,
//! `Φ'(q)` and the scale functions `W^(q)`, and on top of them the
//! resolvent density and avoidance probability of `X` killed on hitting the
//! two-point set `V = {-a, a}`, the resolvent of the process conditioned to
//! avoid `V`, the Laplace-transformed entrance laws of the excursion
//! measures from `V`, and the Laplace transform of the time between the
//! last visit to a point `x` and the first hitting of a point `y > x`.
//!
//! Everything is expressed through the scale-function engine in
//! [`engine`]: closed forms for Brownian motion with drift and for the
//! one-sided stable family, and a damped-series numerical Laplace
//! inversion for the remaining parametric models.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration and the Monte
//! Carlo validation harness live in the companion `snlevy-tools` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conditioned;
pub mod engine;
pub mod entrance;
mod error;
pub mod killed;
pub mod last_visit;
pub(crate) mod math;
pub mod mittag_leffler;
pub mod model;
pub mod quadrature;
pub(crate) mod roots;

pub use engine::{InversionParams, ScaleEngine};
pub use error::{Error, Result};
pub use killed::TwoPointConfig;
pub use model::{JumpFamily, ModelSpec, ValidityReport};
