//! Cross-module identity checks on the two reference models.
//!
//! Each check evaluates one analytic identity numerically and reports the
//! measured error against its pinned tolerance. The suite doubles as the
//! body of the `check identities` subcommand and of the acceptance tests.

use snlevy_core::conditioned::{self, Approach, GridFunction};
use snlevy_core::entrance::{self, EntranceQuery, Part, Side};
use snlevy_core::killed::{self, TwoPointConfig};
use snlevy_core::last_visit;
use snlevy_core::{quadrature, ModelSpec, ScaleEngine};

/// Outcome of one named identity check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub error: f64,
    pub tol: f64,
}

impl CheckResult {
    pub fn pass(&self) -> bool {
        self.error.is_finite() && self.error <= self.tol
    }
}

/// The half-width of the two-point set used throughout the suite.
pub const HALF_WIDTH: f64 = 0.5;

/// The two reference models: Brownian motion and the one-sided stable
/// process with `ψ(λ) = λ^{3/2}`.
pub fn reference_models() -> Vec<(&'static str, ScaleEngine)> {
    vec![
        (
            "bm",
            ScaleEngine::new(ModelSpec::brownian(1.0, 0.0).unwrap()).unwrap(),
        ),
        (
            "stable",
            ScaleEngine::new(ModelSpec::stable(1.5, 1.0).unwrap()).unwrap(),
        ),
    ]
}

fn cfg() -> TwoPointConfig {
    TwoPointConfig::new(HALF_WIDTH).unwrap()
}

/// Integrates `f` over the whole line: forced panel splits at the interior
/// breakpoints, dyadic tail panels on both sides.
fn full_line_integral(
    f: impl Fn(f64) -> f64 + Copy,
    interior: &[f64],
    tol: f64,
) -> Result<f64, snlevy_core::Error> {
    let mut pts = interior.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let core = quadrature::integrate_with_breakpoints(f, &pts, tol)?;
    let hi = *pts.last().unwrap();
    let lo = pts[0];
    let up = quadrature::tail_integral(f, hi, tol)?;
    let down = quadrature::tail_integral(move |t| f(lo - t), 0.0, tol)?;
    Ok(core + up + down)
}

/// Criterion-style check 1: the numerical transform inversion reproduces
/// the closed-form scale functions.
pub fn scale_inversion_accuracy() -> CheckResult {
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for q in [0.5, 1.0, 2.0] {
            for x in [0.1, 0.5, 1.0, 2.0, 3.0] {
                let exact = e.w(q, x).unwrap();
                let inverted = e.w_via_inversion(q, x).unwrap();
                worst = worst.max((inverted - exact).abs() / exact.abs());
            }
        }
    }
    CheckResult {
        name: "scale_inversion_accuracy".into(),
        error: worst,
        tol: 1e-8,
    }
}

/// Check 2: `∫ e^{−θx} W^(q)(x) dx = 1/(ψ(θ) − q)` for `θ > Φ(q)`.
pub fn defining_transform() -> CheckResult {
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for q in [0.5, 1.0, 2.0] {
            let phi = e.phi(q).unwrap();
            for factor in [1.3, 2.0, 3.0] {
                let theta = factor * phi;
                let want = 1.0 / (e.model().psi(theta).unwrap() - q);
                let f = |x: f64| (-theta * x).exp() * e.w(q, x).unwrap();
                let got = quadrature::tail_integral(f, 0.0, 1e-10 * want).unwrap();
                worst = worst.max((got - want).abs() / want.abs());
            }
        }
    }
    CheckResult {
        name: "defining_transform".into(),
        error: worst,
        tol: 1e-6,
    }
}

/// Check 3: `(β−λ)(W^(β) ⋆ W^(λ))(z) = W^(β)(z) − W^(λ)(z)`.
pub fn convolution_identity() -> CheckResult {
    let (beta, lam) = (2.0, 0.5);
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for z in [0.5, 1.0, 2.0] {
            let conv = quadrature::adaptive_simpson(
                |u| e.w(beta, z - u).unwrap() * e.w(lam, u).unwrap(),
                0.0,
                z,
                1e-11,
            )
            .unwrap();
            let want = e.w(beta, z).unwrap() - e.w(lam, z).unwrap();
            worst = worst.max(((beta - lam) * conv - want).abs());
        }
    }
    CheckResult {
        name: "convolution_identity".into(),
        error: worst,
        tol: 1e-8,
    }
}

/// Check 4: `q·∫ v_q(x,y) dy = h_q(x)` over 15 `(q,x)` pairs per model.
pub fn mass_identity() -> CheckResult {
    let c = cfg();
    let a = HALF_WIDTH;
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for q in [0.5, 1.0, 2.0] {
            for x in [-1.3, -0.2, 0.3, 0.9, 1.6] {
                let f = |y: f64| killed::v(&e, &c, q, x, y).unwrap();
                let total = full_line_integral(f, &[-a, x.clamp(-a, a), a], 1e-10).unwrap();
                let h = killed::h(&e, &c, q, x).unwrap();
                worst = worst.max((q * total - h).abs());
            }
        }
    }
    CheckResult {
        name: "mass_identity".into(),
        error: worst,
        tol: 1e-6,
    }
}

/// Check 5: resolvent equation
/// `v_q(x,y) − v_r(x,y) = (r−q)·∫ v_q(x,z) v_r(z,y) dz`.
pub fn resolvent_equation() -> CheckResult {
    let c = cfg();
    let a = HALF_WIDTH;
    let (q, r) = (1.0, 2.0);
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for (x, y) in [(0.2, -0.1), (-0.1, -0.9)] {
            let f = |z: f64| {
                killed::v(&e, &c, q, x, z).unwrap() * killed::v(&e, &c, r, z, y).unwrap()
            };
            let integral =
                full_line_integral(f, &[-a, x.clamp(-a, a), y.clamp(-a, a), a], 1e-10).unwrap();
            let want = killed::v(&e, &c, q, x, y).unwrap() - killed::v(&e, &c, r, x, y).unwrap();
            worst = worst.max(((r - q) * integral - want).abs());
        }
    }
    CheckResult {
        name: "resolvent_equation".into(),
        error: worst,
        tol: 1e-4,
    }
}

fn entrance_mass_one_side(e: &ScaleEngine, beta: f64, side: Side) -> f64 {
    let c = cfg();
    let a = HALF_WIDTH;
    let density = |y: f64| {
        entrance::entrance_density(
            e,
            &c,
            &EntranceQuery {
                beta,
                y,
                side,
                part: Part::Total,
            },
        )
        .unwrap()
    };
    // Split at the kink points and add both tails: the lower-point density
    // lives on (−∞, a), the upper-point one also charges (a, ∞) because
    // the process leaves the upper point continuously upward.
    let inner =
        quadrature::integrate_with_breakpoints(density, &[-a, 0.0, a], 1e-10).unwrap();
    let below = quadrature::tail_integral(move |t| density(-a - t), 0.0, 1e-10).unwrap();
    let above = quadrature::tail_integral(density, a, 1e-10).unwrap();
    let mass = beta * (inner + below + above);
    let want = entrance::excursion_laplace(e, &c, beta, side).unwrap();
    (mass - want).abs()
}

/// Check 6: the entrance-law mass identity
/// `β·∫ dη̂_β = (excursion Laplace functional at β)`, lower point on both
/// models, upper point on the stable model.
pub fn entrance_mass() -> CheckResult {
    let mut worst: f64 = 0.0;
    for (name, e) in reference_models() {
        for beta in [0.5, 1.0, 2.0] {
            worst = worst.max(entrance_mass_one_side(&e, beta, Side::Minus));
            if name == "stable" {
                worst = worst.max(entrance_mass_one_side(&e, beta, Side::Plus));
            }
        }
    }
    CheckResult {
        name: "entrance_mass".into(),
        error: worst,
        tol: 1e-6,
    }
}

/// Check 7: the entrance laws satisfy the resolvent equation
/// `∫ dη̂_β(y) v_γ(y,z) dy = (dη̂_γ/dz − dη̂_β/dz)/(β−γ)`.
pub fn entrance_resolvent() -> CheckResult {
    let c = cfg();
    let a = HALF_WIDTH;
    let (beta, gamma) = (0.5, 1.5);
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for z in [0.2, -0.8] {
            let density = |rate: f64, y: f64| {
                entrance::entrance_density(
                    &e,
                    &c,
                    &EntranceQuery {
                        beta: rate,
                        y,
                        side: Side::Minus,
                        part: Part::Total,
                    },
                )
                .unwrap()
            };
            let f = |y: f64| density(beta, y) * killed::v(&e, &c, gamma, y, z).unwrap();
            let mut pts = vec![-a, z.clamp(-a, a), 0.0, a];
            pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
            pts.dedup();
            let inner = quadrature::integrate_with_breakpoints(f, &pts, 1e-10).unwrap();
            let below =
                quadrature::tail_integral(move |t| f(-a - t), 0.0, 1e-10).unwrap();
            let want = (density(gamma, z) - density(beta, z)) / (beta - gamma);
            worst = worst.max((inner + below - want).abs());
        }
    }
    CheckResult {
        name: "entrance_resolvent".into(),
        error: worst,
        tol: 1e-4,
    }
}

fn boundary_errors(e: &ScaleEngine, side: Approach) -> Vec<f64> {
    let c = cfg();
    let a = HALF_WIDTH;
    let (q, beta) = (1.0, 1.0);
    let g = GridFunction::new(
        vec![-1.6, -1.0, -0.7, -0.3, 0.0, 0.3, 0.7, 1.0, 1.4],
        vec![0.0, 0.8, 0.0, 0.0, 1.0, 0.0, 0.0, 0.6, 0.0],
    )
    .unwrap();
    let limit_integrand = |y: f64| {
        let gy = g.eval(y);
        if gy == 0.0 {
            return 0.0;
        }
        gy * killed::h(e, &c, q, y).unwrap()
            * conditioned::z_limit(e, &c, q, beta, y, side).unwrap()
    };
    let limit = quadrature::integrate_with_breakpoints(
        limit_integrand,
        &[-1.6, -1.0, -0.7, -a, -0.3, 0.0, 0.3, a, 0.7, 1.0, 1.4],
        1e-10,
    )
    .unwrap();
    let (sign, from_above) = match side {
        Approach::UpToMinusA => (-a, false),
        Approach::DownToMinusA => (-a, true),
        Approach::UpToA => (a, false),
        Approach::DownToA => (a, true),
    };
    [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|off| {
            let x = sign + if from_above { *off } else { -off };
            let z = conditioned::z_resolvent(e, &c, q, beta, x, &g).unwrap();
            (z - limit).abs() / limit.abs().max(1e-12)
        })
        .collect()
}

const SIDES: [Approach; 4] = [
    Approach::UpToMinusA,
    Approach::DownToMinusA,
    Approach::UpToA,
    Approach::DownToA,
];

/// Check 8a: near-boundary resolvent values converge to the four limit
/// forms within 1e−3 at offset 1e−4 (Gaussian-component model, all sides;
/// jump-only model, approaches from below).
pub fn boundary_limit_consistency() -> CheckResult {
    let mut worst: f64 = 0.0;
    for (name, e) in reference_models() {
        for side in SIDES {
            let from_above =
                matches!(side, Approach::DownToMinusA | Approach::DownToA);
            if name == "stable" && from_above {
                continue; // covered by the rate check below
            }
            let errs = boundary_errors(&e, side);
            worst = worst.max(errs[2]);
            if !(errs[0] > errs[1] && errs[1] > errs[2]) {
                worst = f64::INFINITY;
            }
        }
    }
    CheckResult {
        name: "boundary_limit_consistency".into(),
        error: worst,
        tol: 1e-3,
    }
}

/// Check 8b: for the jump-only model approached from above, convergence
/// holds at its intrinsic rate `ε^{2−α}`: errors shrink by ≈ `10^{2−α}`
/// per offset decade and the final offset lands under 1.5e−2.
pub fn boundary_limit_rate_sigma_zero() -> CheckResult {
    let e = ScaleEngine::new(ModelSpec::stable(1.5, 1.0).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for side in [Approach::DownToMinusA, Approach::DownToA] {
        let errs = boundary_errors(&e, side);
        let rate = errs[1] / errs[2];
        if !(errs[0] > errs[1] && errs[1] > errs[2]) || !(2.5..=4.5).contains(&rate) {
            worst = f64::INFINITY;
        }
        worst = worst.max(errs[2]);
    }
    CheckResult {
        name: "boundary_limit_rate_sigma_zero".into(),
        error: worst,
        tol: 1.5e-2,
    }
}

/// Check 9: every boundary slope `H(q)` is positive and nondecreasing on
/// the rate grid.
pub fn h_denominator_monotone() -> CheckResult {
    let c = cfg();
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for side in SIDES {
            let mut prev = 0.0;
            for q in [0.5, 1.0, 2.0, 4.0] {
                match conditioned::h_denominator(&e, &c, q, side) {
                    Ok(v) => {
                        worst = worst.max(prev - v);
                        prev = v;
                    }
                    Err(_) => worst = f64::INFINITY,
                }
            }
        }
    }
    CheckResult {
        name: "h_denominator_monotone".into(),
        error: worst,
        tol: 1e-12,
    }
}

/// Check 11: closed algebraic reductions of the last-visit transform and
/// the entrance-law splits.
pub fn algebraic_reductions() -> CheckResult {
    let c = cfg();
    let mut worst: f64 = 0.0;
    for (_, e) in reference_models() {
        for (x, y) in [(0.0, 0.5), (-0.3, 0.9)] {
            for lam in [0.5, 1.0, 3.0] {
                // Started at the lower point, the transform collapses to
                // the single-cycle factor.
                let got = last_visit::last_visit_laplace(&e, lam, x, x, y).unwrap();
                let bridge = e.w(0.0, y - x).unwrap() / e.w(lam, y - x).unwrap()
                    * (-e.phi_zero() * (y - x)).exp();
                worst = worst.max((got - bridge).abs());
            }
            // λ = 0 with Φ(0) = 0: total mass one.
            for z in [x, 0.5 * (x + y), x - 0.4] {
                let got = last_visit::last_visit_laplace(&e, 0.0, z, x, y).unwrap();
                worst = worst.max((got - 1.0).abs());
            }
        }
        // Entrance-law split: the two starting-mode pieces sum to the
        // full excursion functional.
        for q in [0.5, 2.0] {
            let down = entrance::excursion_laplace_split(&e, &c, q, Part::DownStart).unwrap();
            let up = entrance::excursion_laplace_split(&e, &c, q, Part::UpStart).unwrap();
            let total = entrance::excursion_laplace(&e, &c, q, Side::Minus).unwrap();
            worst = worst.max((down + up - total).abs());
            for yv in [-0.2, -0.8] {
                let part = |p: Part| {
                    entrance::entrance_density(
                        &e,
                        &c,
                        &EntranceQuery {
                            beta: q,
                            y: yv,
                            side: Side::Minus,
                            part: p,
                        },
                    )
                    .unwrap()
                };
                worst = worst
                    .max((part(Part::DownStart) + part(Part::UpStart) - part(Part::Total)).abs());
            }
        }
    }
    CheckResult {
        name: "algebraic_reductions".into(),
        error: worst,
        tol: 1e-12,
    }
}

/// Runs the full identity suite (the non-Monte-Carlo acceptance body).
pub fn run_identity_checks() -> Vec<CheckResult> {
    vec![
        scale_inversion_accuracy(),
        defining_transform(),
        convolution_identity(),
        mass_identity(),
        resolvent_equation(),
        entrance_mass(),
        entrance_resolvent(),
        boundary_limit_consistency(),
        boundary_limit_rate_sigma_zero(),
        h_denominator_monotone(),
        algebraic_reductions(),
    ]
}
