//! Scale-function engine: `Φ(q)`, `Φ'(q)`, `W^(q)`, `W^(q)'` and the tilt
//! remainder for a spectrally negative Lévy model.
//!
//! `Φ(q)` is the largest root of `ψ(λ) = q` and `W^(q)` is the function on
//! `[0, ∞)` with Laplace transform `1/(ψ(θ) − q)` for `θ > Φ(q)`, extended
//! by `0` to the negative half-line. Two families come with closed forms:
//!
//! * Brownian motion with drift: with `D = √(γ² + 2qσ²)` and
//!   `θ± = (−γ ± D)/σ²`, `W^(q)(x) = (e^{θ₊x} − e^{θ₋x})/D`.
//! * One-sided stable (`ψ(λ) = c·λ^α`):
//!   `W^(q)(x) = (1/c) x^{α−1} E_{α,α}((q/c) x^α)` with the Mittag-Leffler
//!   function `E`.
//!
//! Any other admissible model goes through a damped-series Laplace
//! inversion of the *tilted* transform `1/(ψ(s + Φ(q)) − q)`, whose
//! preimage `e^{−Φ(q)x} W^(q)(x)` is bounded, so the contour damping
//! controls the aliasing error uniformly in `x`.
//!
//! The engine also exposes the *tilt remainder*
//!
//! ```text
//! r_q(s) = Φ'(q) e^{Φ(q)s} − W^(q)(s),
//! ```
//!
//! which decays as `s → ∞` and equals the potential density of the process
//! killed on hitting a single point, `u_q(y) = r_q(−y)`. Many two-point
//! formulas subtract exponentially growing terms whose difference is a
//! combination of tilt remainders; evaluating `r_q` directly (closed form
//! for Brownian models, algebraic Mittag-Leffler tail for stable ones)
//! keeps those formulas stable far from the origin.

use alloc::collections::BTreeMap;
use core::cell::RefCell;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::mittag_leffler;
use crate::model::{JumpFamily, ModelSpec};
use crate::quadrature;
use crate::roots;

/// Tuning knobs of the numerical transform inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionParams {
    /// Relative stopping tolerance for the accelerated series.
    pub tol: f64,
    /// Hard cap on the number of series terms per evaluation.
    pub max_terms: usize,
    /// Half the contour damping exponent: the aliasing error is of order
    /// `e^{-2·contour_eps}` relative to the sup of the damped preimage.
    pub contour_eps: f64,
}

impl Default for InversionParams {
    fn default() -> Self {
        InversionParams { tol: 1e-10, max_terms: 2000, contour_eps: 12.5 }
    }
}

/// Mittag-Leffler argument beyond which the stable tilt remainder is
/// evaluated through its branch-cut integral instead of the asymptotic-mode
/// deficit: below this the series subtraction keeps ~8 digits, while the
/// cancellation grows like `e^{z^{1/α}}` past it.
const CUT_INTEGRAL_LIMIT: f64 = 30.0;

/// Which evaluation route a model takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    /// `σ > 0`, no jumps.
    Brownian,
    /// `σ = 0`, `γ = 0`, stable jumps.
    Stable,
    /// Everything else: numerical inversion.
    Generic,
}

/// Per-`q` cached root data: `Φ(q)` and `ψ'(Φ(q))`.
#[derive(Clone, Copy)]
struct PhiEntry {
    phi: f64,
    psi_prime_at_phi: f64,
}

/// Scale-function evaluator for one model.
#[derive(Clone)]
pub struct ScaleEngine {
    model: ModelSpec,
    params: InversionParams,
    route: Route,
    cache: RefCell<BTreeMap<u64, PhiEntry>>,
}

impl ScaleEngine {
    /// Builds an engine, rejecting models for which `W(0+) > 0` (neither a
    /// Gaussian part nor infinite-variation jumps).
    pub fn new(model: ModelSpec) -> Result<Self> {
        Self::with_params(model, InversionParams::default())
    }

    pub fn with_params(model: ModelSpec, params: InversionParams) -> Result<Self> {
        if !model.validate().is_valid() {
            return Err(Error::InvalidModel(
                "need sigma > 0 or infinite-variation jumps",
            ));
        }
        if !(params.tol > 0.0) || params.max_terms < 50 || !(params.contour_eps > 1.0) {
            return Err(Error::InvalidParameter(
                "inversion parameters out of range (tol > 0, max_terms >= 50, contour_eps > 1)",
            ));
        }
        let route = match model.jumps() {
            JumpFamily::None => Route::Brownian,
            JumpFamily::Stable { .. } if model.sigma() == 0.0 && model.gamma() == 0.0 => {
                Route::Stable
            }
            _ => Route::Generic,
        };
        Ok(ScaleEngine { model, params, route, cache: RefCell::new(BTreeMap::new()) })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn params(&self) -> &InversionParams {
        &self.params
    }

    fn check_q(q: f64) -> Result<()> {
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::Domain("q must be finite and >= 0"));
        }
        Ok(())
    }

    fn phi_entry(&self, q: f64) -> Result<PhiEntry> {
        Self::check_q(q)?;
        if let Some(e) = self.cache.borrow().get(&q.to_bits()) {
            return Ok(*e);
        }
        let entry = self.compute_phi_entry(q)?;
        self.cache.borrow_mut().insert(q.to_bits(), entry);
        Ok(entry)
    }

    fn compute_phi_entry(&self, q: f64) -> Result<PhiEntry> {
        match self.route {
            Route::Brownian => {
                let (s2, g) = (self.model.sigma() * self.model.sigma(), self.model.gamma());
                let d = math::sqrt(g * g + 2.0 * q * s2);
                let phi = (-g + d) / s2;
                // ψ'(Φ) = σ²Φ + γ = D.
                Ok(PhiEntry { phi, psi_prime_at_phi: d })
            }
            Route::Stable => {
                let JumpFamily::Stable { alpha, c } = self.model.jumps() else { unreachable!() };
                let phi = math::pow(q / c, 1.0 / alpha);
                let d = if phi > 0.0 { c * alpha * math::pow(phi, alpha - 1.0) } else { 0.0 };
                Ok(PhiEntry { phi, psi_prime_at_phi: d })
            }
            Route::Generic => {
                let m0 = self.model.psi_prime_at_zero();
                if q == 0.0 && m0 >= 0.0 {
                    return Ok(PhiEntry { phi: 0.0, psi_prime_at_phi: m0 });
                }
                let mut hi = 1.0;
                let mut guard = 0;
                while self.model.psi(hi)? <= q {
                    hi *= 2.0;
                    guard += 1;
                    if guard > 300 {
                        return Err(Error::NumericalFault("could not bracket the root of psi"));
                    }
                }
                let f = |x: f64| {
                    let v = self.model.psi(x).unwrap_or(f64::INFINITY);
                    let d = if x > 0.0 { self.model.psi_prime(x).unwrap_or(0.0) } else { 0.0 };
                    (v, d)
                };
                let phi = roots::bracketed_newton(f, 0.0, hi, q)?;
                Ok(PhiEntry { phi, psi_prime_at_phi: self.model.psi_prime(phi)? })
            }
        }
    }

    /// `Φ(q)`: the largest root of `ψ(λ) = q`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        Ok(self.phi_entry(q)?.phi)
    }

    /// `Φ(0)` — positive exactly when the process drifts to `-∞`.
    pub fn phi_zero(&self) -> f64 {
        self.phi(0.0).expect("phi(0) is always defined")
    }

    /// `Φ'(q) = 1/ψ'(Φ(q))`; diverges (and errors) at `q = 0` for a
    /// process with zero mean.
    pub fn phi_prime(&self, q: f64) -> Result<f64> {
        let e = self.phi_entry(q)?;
        if e.psi_prime_at_phi <= 0.0 {
            return Err(Error::Domain("phi_prime diverges at q = 0 for a centered process"));
        }
        Ok(1.0 / e.psi_prime_at_phi)
    }

    /// `Φ'(q)^{-1} = ψ'(Φ(q))`, extended continuously to `q = 0`: it is
    /// `ψ'(0+) ∨ 0` when `Φ(0) = 0` (in particular `0` for a centered
    /// process) and `ψ'(Φ(0)) > 0` when the process drifts to `-∞`.
    pub fn phi_prime_inv(&self, q: f64) -> Result<f64> {
        Ok(self.phi_entry(q)?.psi_prime_at_phi)
    }

    /// `W^(q)(x)`, extended by `0` to `x < 0`.
    pub fn w(&self, q: f64, x: f64) -> Result<f64> {
        Self::check_q(q)?;
        if !x.is_finite() {
            return Err(Error::Domain("w requires finite x"));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        match self.route {
            Route::Brownian => {
                let (w, _) = self.brownian_w_pair(q, x);
                Ok(w)
            }
            Route::Stable => {
                let JumpFamily::Stable { alpha, c } = self.model.jumps() else { unreachable!() };
                let z = (q / c) * math::pow(x, alpha);
                Ok(math::pow(x, alpha - 1.0) / c * mittag_leffler::mittag_leffler(alpha, alpha, z)?)
            }
            Route::Generic => {
                let e = self.phi_entry(q)?;
                let f = self.invert_tilted(q, e.phi, x, false)?;
                Ok(math::exp(e.phi * x) * f)
            }
        }
    }

    /// `W^(q)'(x)` for `x > 0`.
    pub fn w_prime(&self, q: f64, x: f64) -> Result<f64> {
        Self::check_q(q)?;
        if !(x > 0.0) {
            return Err(Error::Domain("w_prime requires x > 0"));
        }
        match self.route {
            Route::Brownian => {
                let (_, wp) = self.brownian_w_pair(q, x);
                Ok(wp)
            }
            Route::Stable => {
                let JumpFamily::Stable { alpha, c } = self.model.jumps() else { unreachable!() };
                let z = (q / c) * math::pow(x, alpha);
                Ok(math::pow(x, alpha - 2.0) / c
                    * mittag_leffler::mittag_leffler(alpha, alpha - 1.0, z)?)
            }
            Route::Generic => {
                let e = self.phi_entry(q)?;
                let f = self.invert_tilted(q, e.phi, x, false)?;
                let fp = self.invert_tilted(q, e.phi, x, true)?;
                Ok(math::exp(e.phi * x) * (fp + e.phi * f))
            }
        }
    }

    /// Both `W^(q)` and `W^(q)'` for a Brownian model, sharing the root data.
    fn brownian_w_pair(&self, q: f64, x: f64) -> (f64, f64) {
        let (s2, g) = (self.model.sigma() * self.model.sigma(), self.model.gamma());
        let d = math::sqrt(g * g + 2.0 * q * s2);
        if d == 0.0 {
            // q = 0 and γ = 0: W(x) = 2x/σ².
            return (2.0 * x / s2, 2.0 / s2);
        }
        let tp = (-g + d) / s2;
        let tm = (-g - d) / s2;
        let (ep, em) = (math::exp(tp * x), math::exp(tm * x));
        ((ep - em) / d, (tp * ep - tm * em) / d)
    }

    /// The tilt remainder `r_q(s) = Φ'(q) e^{Φ(q)s} − W^(q)(s)`, for any
    /// real `s` (for `s ≤ 0` it is just the exponential term). Equals the
    /// single-point potential density `u_q(−s)`; positive and decaying as
    /// `s → +∞`.
    pub fn tilt_remainder(&self, q: f64, s: f64) -> Result<f64> {
        let e = self.phi_entry(q)?;
        if e.psi_prime_at_phi <= 0.0 {
            return Err(Error::Domain("tilt remainder needs phi_prime finite (q > 0 or nonzero mean)"));
        }
        let phip = 1.0 / e.psi_prime_at_phi;
        if s <= 0.0 {
            return Ok(phip * math::exp(e.phi * s));
        }
        match self.route {
            Route::Brownian => {
                let (s2, g) = (self.model.sigma() * self.model.sigma(), self.model.gamma());
                let d = math::sqrt(g * g + 2.0 * q * s2);
                let tm = (-g - d) / s2;
                Ok(math::exp(tm * s) / d)
            }
            Route::Stable => {
                let JumpFamily::Stable { alpha, c } = self.model.jumps() else { unreachable!() };
                let z = (q / c) * math::pow(s, alpha);
                if z > CUT_INTEGRAL_LIMIT {
                    return self.stable_remainder_integral(q, s, 0);
                }
                Ok(-math::pow(s, alpha - 1.0) / c * mittag_leffler::exp_deficit(alpha, alpha, z)?)
            }
            Route::Generic => {
                // Direct subtraction; loses relative accuracy once
                // Φ(q)·s is large, which callers bound by keeping the
                // geometry (a, |x|, |y|) moderate for generic models.
                Ok(phip * math::exp(e.phi * s) - self.w(q, s)?)
            }
        }
    }

    /// `d/ds` of the tilt remainder: `Φ'(q)Φ(q)e^{Φ(q)s} − W^(q)'(s)`.
    pub fn tilt_remainder_prime(&self, q: f64, s: f64) -> Result<f64> {
        let e = self.phi_entry(q)?;
        if e.psi_prime_at_phi <= 0.0 {
            return Err(Error::Domain("tilt remainder needs phi_prime finite (q > 0 or nonzero mean)"));
        }
        let phip = 1.0 / e.psi_prime_at_phi;
        if s <= 0.0 {
            return Ok(phip * e.phi * math::exp(e.phi * s));
        }
        match self.route {
            Route::Brownian => {
                let (s2, g) = (self.model.sigma() * self.model.sigma(), self.model.gamma());
                let d = math::sqrt(g * g + 2.0 * q * s2);
                let tm = (-g - d) / s2;
                Ok(tm * math::exp(tm * s) / d)
            }
            Route::Stable => {
                let JumpFamily::Stable { alpha, c } = self.model.jumps() else { unreachable!() };
                let z = (q / c) * math::pow(s, alpha);
                if z > CUT_INTEGRAL_LIMIT {
                    return Ok(-self.stable_remainder_integral(q, s, 1)?);
                }
                Ok(-math::pow(s, alpha - 2.0) / c
                    * mittag_leffler::exp_deficit(alpha, alpha - 1.0, z)?)
            }
            Route::Generic => {
                Ok(phip * e.phi * math::exp(e.phi * s) - self.w_prime(q, s)?)
            }
        }
    }

    /// Spectral density of the stable tilt remainder: continuing
    /// `1/(ψ(λ) − q)` across the negative half-line gives
    /// `r_q(s) = ∫_0^∞ e^{−st} ρ_q(t) dt` with
    /// `ρ_q(t) = b/(π(a² + b²))`, `a = c·t^α cos(πα) − q`,
    /// `b = −c·t^α sin(πα)` (positive for `α ∈ (1, 2)`).
    fn stable_cut_density(alpha: f64, c: f64, q: f64, t: f64) -> f64 {
        let ta = c * math::pow(t, alpha);
        let a = ta * math::cos(PI * alpha) - q;
        let b = -ta * math::sin(PI * alpha);
        b / (PI * (a * a + b * b))
    }

    /// `∫_0^∞ t^m e^{−st} ρ_q(t) dt` for `m ∈ {0, 1}`: the stable tilt
    /// remainder (`m = 0`) and minus its derivative (`m = 1`). Every factor
    /// is positive, so unlike the asymptotic-mode subtraction this loses no
    /// accuracy however large `Φ(q)·s` gets.
    fn stable_remainder_integral(&self, q: f64, s: f64, moment: u32) -> Result<f64> {
        let JumpFamily::Stable { alpha, c } = self.model.jumps() else { unreachable!() };
        let phi = self.phi(q)?;
        let f = |t: f64| {
            let w = if moment == 0 { 1.0 } else { t };
            w * math::exp(-s * t) * Self::stable_cut_density(alpha, c, q, t)
        };
        // The exponential factor confines the integrand to t ≲ 45/s; this
        // branch only runs once s·Φ(q) is large, so that window always
        // covers the peak of ρ_q (which sits at scale Φ(q)) as far as it
        // still matters.
        let cap = 45.0 / s;
        let mut scale = 0.0_f64;
        for k in 1..=16 {
            scale = scale.max(math::fabs(f(cap * k as f64 / 16.0)));
        }
        if scale == 0.0 {
            return Ok(0.0);
        }
        let mut pts = alloc::vec![0.0, 0.25 * phi, 0.5 * phi, phi, 2.0 * phi, 4.0 * phi];
        pts.retain(|&t| t < cap);
        pts.push(cap);
        quadrature::integrate_with_breakpoints(f, &pts, 1e-12 * scale * cap)
    }

    /// `W^(q)'(s) − Φ(q) W^(q)(s)`, the kernel appearing in creeping
    /// probabilities; equals `Φ(q)·r_q(s) − r_q'(s)`.
    pub fn creep_kernel(&self, q: f64, s: f64) -> Result<f64> {
        let phi = self.phi(q)?;
        Ok(phi * self.tilt_remainder(q, s)? - self.tilt_remainder_prime(q, s)?)
    }

    /// Potential density of the process killed on hitting `0`:
    /// `u_q(y) = Φ'(q) e^{−Φ(q)y} − W^(q)(−y)`.
    pub fn u_density(&self, q: f64, y: f64) -> Result<f64> {
        self.tilt_remainder(q, -y)
    }

    /// `W^(q)(x)` through the numerical inversion route regardless of the
    /// model family; used to validate the closed-form fast paths.
    pub fn w_via_inversion(&self, q: f64, x: f64) -> Result<f64> {
        Self::check_q(q)?;
        if x <= 0.0 {
            return Ok(0.0);
        }
        let e = self.phi_entry(q)?;
        let f = self.invert_tilted(q, e.phi, x, false)?;
        Ok(math::exp(e.phi * x) * f)
    }

    /// `W^(q)'(x)` through the numerical inversion route.
    pub fn w_prime_via_inversion(&self, q: f64, x: f64) -> Result<f64> {
        Self::check_q(q)?;
        if !(x > 0.0) {
            return Err(Error::Domain("w_prime requires x > 0"));
        }
        let e = self.phi_entry(q)?;
        let f = self.invert_tilted(q, e.phi, x, false)?;
        let fp = self.invert_tilted(q, e.phi, x, true)?;
        Ok(math::exp(e.phi * x) * (fp + e.phi * f))
    }

    /// Inverts the tilted transform `1/(ψ(s + Φ(q)) − q)` at `x > 0`,
    /// recovering `f(x) = e^{−Φ(q)x} W^(q)(x)`; with `derivative` set it
    /// inverts `s/(ψ(s + Φ(q)) − q)` instead, recovering `f'(x)` (valid
    /// because `f(0) = 0`).
    fn invert_tilted(&self, q: f64, phi: f64, x: f64, derivative: bool) -> Result<f64> {
        let transform = |s: Complex64| {
            let base = (self.model.psi_complex(s + phi) - q).finv();
            if derivative {
                s * base
            } else {
                base
            }
        };
        self.euler_invert(transform, x)
    }

    /// Damped trapezoidal inversion with binomial (Euler) acceleration of
    /// the alternating tail.
    fn euler_invert(&self, transform: impl Fn(Complex64) -> Complex64, x: f64) -> Result<f64> {
        const M: usize = 16;
        // C(M, j) / 2^M
        let mut weights = [0.0f64; M + 1];
        weights[0] = 1.0;
        for j in 1..=M {
            weights[j] = weights[j - 1] * (M - j + 1) as f64 / j as f64;
        }
        let norm = math::pow(2.0, -(M as f64));

        let a = 2.0 * self.params.contour_eps;
        let c = a / (2.0 * x);
        let h = PI / x;
        let front = math::exp(a / 2.0) / x;

        let mut partial = 0.5 * transform(Complex64::new(c, 0.0)).re;
        let mut window = [0.0f64; M + 1];
        let mut filled = 0usize;
        let mut prev_est = f64::NAN;
        let mut stable_steps = 0usize;

        for k in 1..=self.params.max_terms {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            partial += sign * transform(Complex64::new(c, k as f64 * h)).re;
            // Shift the window of trailing partial sums.
            if filled <= M {
                window[filled] = partial;
                filled += 1;
            } else {
                for j in 0..M {
                    window[j] = window[j + 1];
                }
                window[M] = partial;
            }
            if filled > M && k >= 32 {
                let mut est = 0.0;
                for j in 0..=M {
                    est += weights[j] * window[j];
                }
                est *= norm;
                let scale = math::fabs(est).max(1e-12);
                if math::fabs(est - prev_est) <= self.params.tol * scale {
                    stable_steps += 1;
                    if stable_steps >= 2 {
                        return Ok(front * est);
                    }
                } else {
                    stable_steps = 0;
                }
                prev_est = est;
            }
        }
        Err(Error::Accuracy {
            message: "transform inversion did not converge",
            estimate: math::fabs(prev_est),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    fn bm() -> ScaleEngine {
        ScaleEngine::new(ModelSpec::brownian(1.0, 0.0).unwrap()).unwrap()
    }

    fn stable15() -> ScaleEngine {
        ScaleEngine::new(ModelSpec::stable(1.5, 1.0).unwrap()).unwrap()
    }

    fn tempered() -> ScaleEngine {
        ScaleEngine::new(
            ModelSpec::new(
                0.6,
                -0.2,
                JumpFamily::TemperedStable { alpha: 1.4, c: 0.5, theta0: 1.5 },
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_irregular_model() {
        let cpp = ModelSpec::new(
            0.0,
            1.0,
            JumpFamily::CompoundPoissonExp { rate: 1.0, mean: 1.0 },
        )
        .unwrap();
        assert!(matches!(ScaleEngine::new(cpp), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn phi_closed_forms() {
        // Standard BM: Φ(q) = √(2q).
        assert!(close(bm().phi(1.0).unwrap(), core::f64::consts::SQRT_2, 1e-14));
        // Stable α = 3/2, c = 1: Φ(q) = q^{2/3}.
        assert!(close(stable15().phi(8.0).unwrap(), 4.0, 1e-14));
        assert_eq!(bm().phi_zero(), 0.0);
        assert_eq!(stable15().phi_zero(), 0.0);
    }

    #[test]
    fn phi_zero_with_negative_mean() {
        // σ = 1, γ = −1: Φ(0) = 2.
        let e = ScaleEngine::new(ModelSpec::brownian(1.0, -1.0).unwrap()).unwrap();
        assert!(close(e.phi_zero(), 2.0, 1e-14));
        assert!(close(e.phi_prime_inv(0.0).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn phi_prime_conventions() {
        // Centered BM: Φ'(0) diverges, its reciprocal is 0 by convention.
        assert!(bm().phi_prime(0.0).is_err());
        assert_eq!(bm().phi_prime_inv(0.0).unwrap(), 0.0);
        // Positive mean: Φ'(0)^{-1} = ψ'(0+).
        let up = ScaleEngine::new(ModelSpec::brownian(1.0, 0.7).unwrap()).unwrap();
        assert!(close(up.phi_prime_inv(0.0).unwrap(), 0.7, 1e-14));
        // q > 0: Φ'(q) = 1/ψ'(Φ(q)); BM q = 1 gives D = √2.
        assert!(close(bm().phi_prime(1.0).unwrap(), 1.0 / core::f64::consts::SQRT_2, 1e-14));
    }

    #[test]
    fn phi_generic_matches_root_equation() {
        let e = tempered();
        for q in [0.0, 0.3, 1.0, 5.0] {
            let phi = e.phi(q).unwrap();
            assert!((e.model().psi(phi).unwrap() - q).abs() < 1e-10 * q.max(1.0));
        }
    }

    #[test]
    fn brownian_scale_closed_form() {
        // Standard BM, q = 1: W^(1)(x) = √2 sinh(√2 x).
        let e = bm();
        let s2 = core::f64::consts::SQRT_2;
        for x in [0.2, 1.0, 3.0] {
            assert!(close(e.w(1.0, x).unwrap(), s2 * (s2 * x).sinh(), 1e-13));
            assert!(close(e.w_prime(1.0, x).unwrap(), 2.0 * (s2 * x).cosh(), 1e-13));
        }
        assert_eq!(e.w(1.0, -0.5).unwrap(), 0.0);
        assert_eq!(e.w(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn stable_scale_at_zero_rate() {
        // q = 0: W(x) = x^{α−1}/(c Γ(α)).
        let e = stable15();
        let g = libm::tgamma(1.5);
        for x in [0.4, 1.0, 2.5] {
            assert!(close(e.w(0.0, x).unwrap(), x.powf(0.5) / g, 1e-13));
        }
    }

    #[test]
    fn w_prime_matches_finite_difference() {
        for e in [bm(), stable15(), tempered()] {
            for (q, x) in [(1.0, 0.7), (2.5, 1.3), (0.5, 2.0)] {
                let h = 1e-5;
                let fd = (e.w(q, x + h).unwrap() - e.w(q, x - h).unwrap()) / (2.0 * h);
                let d = e.w_prime(q, x).unwrap();
                assert!(close(fd, d, 1e-5), "q={q} x={x}: fd {fd} vs {d}");
            }
        }
    }

    #[test]
    fn generic_route_agrees_with_brownian_closed_form() {
        // Adding a zero-rate-free compound Poisson part with tiny rate has a
        // visible effect, so instead force the generic route by comparing a
        // Brownian model against itself evaluated through inversion: use a
        // model with jumps whose exponent we can also realize exactly.
        // σ = 1, γ = 0.3 with exponential compound Poisson jumps has
        // rational exponent; here we simply check the generic inversion on a
        // drifted BM routed generically via a tempered part with c → small.
        let gen = ScaleEngine::new(
            ModelSpec::new(
                1.0,
                0.3,
                JumpFamily::TemperedStable { alpha: 1.5, c: 1e-12, theta0: 1.0 },
            )
            .unwrap(),
        )
        .unwrap();
        let exact = ScaleEngine::new(ModelSpec::brownian(1.0, 0.3).unwrap()).unwrap();
        for (q, x) in [(1.0, 0.5), (0.7, 2.0), (3.0, 1.0)] {
            let a = gen.w(q, x).unwrap();
            let b = exact.w(q, x).unwrap();
            assert!(close(a, b, 1e-7), "w: q={q} x={x}: {a} vs {b}");
            let ap = gen.w_prime(q, x).unwrap();
            let bp = exact.w_prime(q, x).unwrap();
            assert!(close(ap, bp, 1e-6), "w': q={q} x={x}: {ap} vs {bp}");
        }
    }

    #[test]
    fn tilt_remainder_consistent_with_subtraction() {
        for e in [bm(), stable15(), tempered()] {
            for (q, s) in [(1.0, 0.5), (1.0, 2.0), (2.0, 1.0)] {
                let direct = e.phi_prime(q).unwrap() * (e.phi(q).unwrap() * s).exp()
                    - e.w(q, s).unwrap();
                let r = e.tilt_remainder(q, s).unwrap();
                assert!(close(r, direct, 1e-6), "q={q} s={s}: {r} vs {direct}");
                assert!(r > 0.0);
            }
            // Negative side is the bare exponential.
            let r = e.tilt_remainder(1.0, -1.5).unwrap();
            let want = e.phi_prime(1.0).unwrap() * (-1.5 * e.phi(1.0).unwrap()).exp();
            assert!(close(r, want, 1e-14));
        }
    }

    #[test]
    fn tilt_remainder_prime_matches_finite_difference() {
        for e in [bm(), stable15()] {
            for (q, s) in [(1.0, 0.8), (2.0, 3.0), (1.0, -0.5)] {
                let h = 1e-5;
                let fd = (e.tilt_remainder(q, s + h).unwrap()
                    - e.tilt_remainder(q, s - h).unwrap())
                    / (2.0 * h);
                let d = e.tilt_remainder_prime(q, s).unwrap();
                assert!(close(fd, d, 1e-5), "q={q} s={s}: fd {fd} vs {d}");
            }
        }
    }

    #[test]
    fn tilt_remainder_decays_far_out() {
        // Stable remainder via the algebraic tail: r_q(s) ~ s^{-1-α} q^{-2} α(α+1)/Γ(1-α)...
        // just check positivity and monotone decay on a coarse grid.
        let e = stable15();
        let mut prev = f64::INFINITY;
        for s in [1.0, 5.0, 20.0, 80.0, 300.0] {
            let r = e.tilt_remainder(1.0, s).unwrap();
            assert!(r > 0.0 && r < prev, "s={s}: r={r} prev={prev}");
            prev = r;
        }
    }

    #[test]
    fn stable_cut_integral_matches_series_branch() {
        // In the overlap region the series-based deficit still has ~8 good
        // digits, so the two evaluations must agree there.
        let e = stable15();
        for q in [0.5, 1.0, 2.0] {
            for z in [12.0, 20.0, 29.0] {
                let s = f64::powf(z / q, 1.0 / 1.5);
                let series = e.tilt_remainder(q, s).unwrap();
                let integral = e.stable_remainder_integral(q, s, 0).unwrap();
                assert!(close(series, integral, 1e-7), "q={q} z={z}: {series} vs {integral}");
                let series_d = e.tilt_remainder_prime(q, s).unwrap();
                let integral_d = -e.stable_remainder_integral(q, s, 1).unwrap();
                assert!(close(series_d, integral_d, 1e-7),
                    "prime q={q} z={z}: {series_d} vs {integral_d}");
            }
        }
    }

    #[test]
    fn creep_kernel_identity() {
        for e in [bm(), tempered()] {
            for (q, s) in [(1.0, 0.6), (2.0, 1.4)] {
                let lhs = e.creep_kernel(q, s).unwrap();
                let rhs = e.w_prime(q, s).unwrap() - e.phi(q).unwrap() * e.w(q, s).unwrap();
                assert!(close(lhs, rhs, 1e-6), "q={q} s={s}: {lhs} vs {rhs}");
            }
        }
    }
}
