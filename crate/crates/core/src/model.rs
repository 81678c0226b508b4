//! Parametric spectrally negative Lévy models and their Laplace exponents.
//!
//! A model is the triplet `(σ, γ, Π)` entering
//!
//! ```text
//! ψ(λ) = ½σ²λ² + γλ + ∫ (e^{λx} − 1 − λx·1_{jump compensation}) Π(dx)
//! ```
//!
//! with `Π` carried by `(-∞, 0)`. Only parametric jump families with a
//! closed-form exponent are supported; the conventions are:
//!
//! * `Stable { alpha, c }` — one-sided stable jumps, normalized directly
//!   through the exponent: the jump part contributes `c·λ^α` (the linear
//!   compensation term is absorbed into `γ`).
//! * `TemperedStable { alpha, c, theta0 }` — Lévy density
//!   `c·e^{-θ₀|x|}/|x|^{1+α}` on `(-∞,0)` with full compensation, so the
//!   jump part contributes `c·Γ(-α)·((θ₀+λ)^α − θ₀^α − α·θ₀^{α-1}·λ)`
//!   (note `Γ(-α) > 0` for `α ∈ (1,2)`); for `θ₀ = 0` this degenerates to
//!   `c·Γ(-α)·λ^α`. With full compensation the jump part is centered, so
//!   `ψ'(0+) = γ`.
//! * `CompoundPoissonExp { rate, mean }` — finite activity, jump sizes
//!   `-E` with `E` exponential of mean `mean`; no compensation, the jump
//!   part contributes `rate·(1/(1 + mean·λ) − 1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Jump-measure family of a [`ModelSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpFamily {
    /// No jumps (Brownian motion with drift).
    None,
    /// One-sided stable jumps; the jump part of the exponent is `c·λ^α`.
    Stable { alpha: f64, c: f64 },
    /// Tempered stable jumps, fully compensated.
    TemperedStable { alpha: f64, c: f64, theta0: f64 },
    /// Compound Poisson with exponential downward jumps.
    CompoundPoissonExp { rate: f64, mean: f64 },
}

/// A spectrally negative Lévy triplet with evaluable Laplace exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    sigma: f64,
    gamma: f64,
    jumps: JumpFamily,
}

/// Outcome of checking the standing regularity assumption.
///
/// The process must have `σ > 0` or jumps of infinite variation; otherwise
/// points are irregular and none of the two-point identities apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityReport {
    pub gaussian_clause: bool,
    pub infinite_variation_clause: bool,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.gaussian_clause || self.infinite_variation_clause
    }
}

impl ModelSpec {
    /// Builds a model, checking parameter ranges (but not the regularity
    /// assumption; see [`ModelSpec::validate`]).
    pub fn new(sigma: f64, gamma: f64, jumps: JumpFamily) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter("gamma must be finite"));
        }
        match jumps {
            JumpFamily::None => {}
            JumpFamily::Stable { alpha, c } => {
                if !(alpha > 1.0 && alpha < 2.0) {
                    return Err(Error::InvalidParameter("stable alpha must lie in (1,2)"));
                }
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidParameter("stable c must be finite and > 0"));
                }
            }
            JumpFamily::TemperedStable { alpha, c, theta0 } => {
                if !(alpha > 1.0 && alpha < 2.0) {
                    return Err(Error::InvalidParameter("tempered alpha must lie in (1,2)"));
                }
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidParameter("tempered c must be finite and > 0"));
                }
                if !(theta0 >= 0.0) || !theta0.is_finite() {
                    return Err(Error::InvalidParameter("tempering theta0 must be finite and >= 0"));
                }
            }
            JumpFamily::CompoundPoissonExp { rate, mean } => {
                if !(rate > 0.0) || !rate.is_finite() {
                    return Err(Error::InvalidParameter("compound Poisson rate must be > 0"));
                }
                if !(mean > 0.0) || !mean.is_finite() {
                    return Err(Error::InvalidParameter("mean jump size must be > 0"));
                }
            }
        }
        Ok(ModelSpec { sigma, gamma, jumps })
    }

    /// Brownian motion with volatility `sigma` and drift `gamma`.
    pub fn brownian(sigma: f64, gamma: f64) -> Result<Self> {
        Self::new(sigma, gamma, JumpFamily::None)
    }

    /// Pure one-sided stable model with exponent `ψ(λ) = c·λ^α`.
    pub fn stable(alpha: f64, c: f64) -> Result<Self> {
        Self::new(0.0, 0.0, JumpFamily::Stable { alpha, c })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn jumps(&self) -> JumpFamily {
        self.jumps
    }

    /// Checks the standing assumption: `σ > 0` or infinite-variation jumps.
    pub fn validate(&self) -> ValidityReport {
        let infinite_variation = matches!(
            self.jumps,
            JumpFamily::Stable { .. } | JumpFamily::TemperedStable { .. }
        );
        ValidityReport {
            gaussian_clause: self.sigma > 0.0,
            infinite_variation_clause: infinite_variation,
        }
    }

    /// The Laplace exponent `ψ(λ)` for `λ ≥ 0`.
    pub fn psi(&self, lam: f64) -> Result<f64> {
        if !(lam >= 0.0) {
            return Err(Error::Domain("psi requires lam >= 0"));
        }
        Ok(0.5 * self.sigma * self.sigma * lam * lam + self.gamma * lam + self.psi_jump(lam))
    }

    fn psi_jump(&self, lam: f64) -> f64 {
        match self.jumps {
            JumpFamily::None => 0.0,
            JumpFamily::Stable { alpha, c } => c * math::pow(lam, alpha),
            JumpFamily::TemperedStable { alpha, c, theta0 } => {
                let g = math::tgamma(-alpha);
                if theta0 == 0.0 {
                    c * g * math::pow(lam, alpha)
                } else {
                    c * g
                        * (math::pow(theta0 + lam, alpha)
                            - math::pow(theta0, alpha)
                            - alpha * math::pow(theta0, alpha - 1.0) * lam)
                }
            }
            JumpFamily::CompoundPoissonExp { rate, mean } => {
                rate * (1.0 / (1.0 + mean * lam) - 1.0)
            }
        }
    }

    /// The derivative `ψ'(λ)` for `λ > 0`.
    pub fn psi_prime(&self, lam: f64) -> Result<f64> {
        if !(lam > 0.0) {
            return Err(Error::Domain("psi_prime requires lam > 0"));
        }
        let jump = match self.jumps {
            JumpFamily::None => 0.0,
            JumpFamily::Stable { alpha, c } => c * alpha * math::pow(lam, alpha - 1.0),
            JumpFamily::TemperedStable { alpha, c, theta0 } => {
                c * math::tgamma(-alpha)
                    * alpha
                    * (math::pow(theta0 + lam, alpha - 1.0)
                        - if theta0 == 0.0 { 0.0 } else { math::pow(theta0, alpha - 1.0) })
            }
            JumpFamily::CompoundPoissonExp { rate, mean } => {
                let d = 1.0 + mean * lam;
                -rate * mean / (d * d)
            }
        };
        Ok(self.sigma * self.sigma * lam + self.gamma + jump)
    }

    /// Right derivative `ψ'(0+)` (the mean of `X₁` when finite).
    pub fn psi_prime_at_zero(&self) -> f64 {
        match self.jumps {
            JumpFamily::None | JumpFamily::Stable { .. } | JumpFamily::TemperedStable { .. } => {
                self.gamma
            }
            JumpFamily::CompoundPoissonExp { rate, mean } => self.gamma - rate * mean,
        }
    }

    /// The Laplace exponent extended to complex arguments with `Re s > 0`,
    /// used by the numerical transform inversion. Powers use the principal
    /// branch.
    pub fn psi_complex(&self, s: Complex64) -> Complex64 {
        let jump = match self.jumps {
            JumpFamily::None => Complex64::new(0.0, 0.0),
            JumpFamily::Stable { alpha, c } => s.powf(alpha) * c,
            JumpFamily::TemperedStable { alpha, c, theta0 } => {
                let g = math::tgamma(-alpha);
                if theta0 == 0.0 {
                    s.powf(alpha) * (c * g)
                } else {
                    ((s + theta0).powf(alpha)
                        - math::pow(theta0, alpha)
                        - s * (alpha * math::pow(theta0, alpha - 1.0)))
                        * (c * g)
                }
            }
            JumpFamily::CompoundPoissonExp { rate, mean } => {
                (Complex64::new(1.0, 0.0) / (s * mean + 1.0) - 1.0) * rate
            }
        };
        s * s * (0.5 * self.sigma * self.sigma) + s * self.gamma + jump
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bm() -> ModelSpec {
        ModelSpec::brownian(1.0, 0.0).unwrap()
    }

    fn stable15() -> ModelSpec {
        ModelSpec::stable(1.5, 1.0).unwrap()
    }

    #[test]
    fn psi_at_zero_vanishes() {
        for m in [
            bm(),
            stable15(),
            ModelSpec::new(0.5, -0.3, JumpFamily::TemperedStable { alpha: 1.5, c: 0.7, theta0: 2.0 })
                .unwrap(),
            ModelSpec::new(1.0, 0.2, JumpFamily::CompoundPoissonExp { rate: 2.0, mean: 0.5 })
                .unwrap(),
        ] {
            assert_eq!(m.psi(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn psi_brownian() {
        assert!((bm().psi(2.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn psi_stable() {
        // 4^1.5 = 8
        assert!((stable15().psi(4.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn psi_rejects_negative_argument() {
        assert!(matches!(bm().psi(-1.0), Err(Error::Domain(_))));
        assert!(matches!(bm().psi_prime(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn psi_prime_closed_forms() {
        assert!((bm().psi_prime(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((stable15().psi_prime(1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn psi_prime_matches_finite_difference() {
        let models = [
            bm(),
            stable15(),
            ModelSpec::new(0.4, -0.2, JumpFamily::TemperedStable { alpha: 1.3, c: 0.9, theta0: 1.5 })
                .unwrap(),
            ModelSpec::new(0.8, 0.1, JumpFamily::CompoundPoissonExp { rate: 1.5, mean: 0.7 })
                .unwrap(),
        ];
        for m in models {
            for lam in [0.5, 1.0, 2.0, 5.0] {
                let h = 1e-6 * lam;
                let fd = (m.psi(lam + h).unwrap() - m.psi(lam - h).unwrap()) / (2.0 * h);
                let d = m.psi_prime(lam).unwrap();
                assert!(
                    (fd - d).abs() <= 1e-6 * d.abs().max(1.0),
                    "fd {fd} vs closed {d} at lam={lam} for {m:?}"
                );
            }
        }
    }

    #[test]
    fn convexity_on_grid() {
        for m in [bm(), stable15()] {
            let grid = [0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
            let mut prev_slope = f64::NEG_INFINITY;
            for w in grid.windows(2) {
                let slope = (m.psi(w[1]).unwrap() - m.psi(w[0]).unwrap()) / (w[1] - w[0]);
                assert!(slope >= prev_slope - 1e-12);
                prev_slope = slope;
            }
        }
    }

    #[test]
    fn validity_clauses() {
        assert!(bm().validate().gaussian_clause);
        let r = stable15().validate();
        assert!(!r.gaussian_clause && r.infinite_variation_clause && r.is_valid());
        let cpp = ModelSpec::new(0.0, 1.0, JumpFamily::CompoundPoissonExp { rate: 1.0, mean: 1.0 })
            .unwrap();
        assert!(!cpp.validate().is_valid());
    }

    #[test]
    fn complex_exponent_agrees_on_real_axis() {
        let models = [
            bm(),
            stable15(),
            ModelSpec::new(0.4, -0.2, JumpFamily::TemperedStable { alpha: 1.3, c: 0.9, theta0: 1.5 })
                .unwrap(),
            ModelSpec::new(0.8, 0.1, JumpFamily::CompoundPoissonExp { rate: 1.5, mean: 0.7 })
                .unwrap(),
        ];
        for m in models {
            for lam in [0.3, 1.0, 3.7] {
                let z = m.psi_complex(Complex64::new(lam, 0.0));
                assert!((z.re - m.psi(lam).unwrap()).abs() < 1e-12 * z.re.abs().max(1.0));
                assert!(z.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelSpec::new(-1.0, 0.0, JumpFamily::None).is_err());
        assert!(ModelSpec::stable(2.5, 1.0).is_err());
        assert!(ModelSpec::stable(1.5, -1.0).is_err());
        assert!(ModelSpec::new(0.0, 0.0, JumpFamily::CompoundPoissonExp { rate: 0.0, mean: 1.0 })
            .is_err());
    }
}
