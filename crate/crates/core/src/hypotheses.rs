//! Checkable hypotheses: the weighted coefficient matrix and its optimal
//! weight, sufficient row-sum tests, invariant-ball radii, the monotone-map
//! a-priori bound, and sampling-based falsification of declared Lipschitz
//! and growth constants.
//!
//! Declared constants are user input. They are never proved here, only
//! falsified: a found counterexample is decisive, a clean run is evidence.

use crate::expr::{Params, ScalarExpr};
use crate::matrix::{MatrixError, NonnegMatrix, Verdict, DEFAULT_BOUNDARY_BAND};
use crate::operator::{apply_t, OperatorError, ProblemSpec};
use crate::space::{AugmentedState, GridFunction, SpaceError, SystemState, ThetaWeight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Grid used for the quadrature inside the a-priori bound map.
const APRIORI_QUADRATURE_INTERVALS: usize = 1024;
/// Iteration cap for the monotone a-priori map.
const APRIORI_ITERATION_CAP: usize = 10_000;
/// Number of log-spaced points in the weight search grid.
const THETA_GRID_POINTS: usize = 200;
const THETA_MIN: f64 = 1e-3;
const THETA_MAX: f64 = 1e3;

#[derive(Debug, Error)]
pub enum HypothesesError {
    #[error("declared constant {name} is {value}; constants must be finite and nonnegative")]
    InvalidConstant { name: &'static str, value: f64 },
    #[error("no {kind} constants declared on the problem")]
    MissingDeclaration { kind: &'static str },
    #[error("the weighted coefficient matrix is not convergent to zero (spectral radius {rho})")]
    NotConvergent { rho: f64 },
    #[error("no a-priori bound: the monotone map reached {at:?} without settling below the cap")]
    NoBoundFound { at: [f64; 2] },
    #[error("cap components must be positive, got {cap:?}")]
    InvalidCap { cap: [f64; 2] },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Eval(#[from] crate::expr::EvalError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Declared Lipschitz slopes: `|f_i(t,x,y) - f_i(t,xb,yb)| <= a_i |x - xb| +
/// b_i |y - yb|` for the right-hand sides and the analogous sup-norm bounds
/// for the functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzSpec {
    pub f1_x: f64,
    pub f1_y: f64,
    pub f2_x: f64,
    pub f2_y: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
}

impl LipschitzSpec {
    pub fn validated(self) -> Result<Self, HypothesesError> {
        for (name, value) in [
            ("f1_x", self.f1_x),
            ("f1_y", self.f1_y),
            ("f2_x", self.f2_x),
            ("f2_y", self.f2_y),
            ("alpha_x", self.alpha_x),
            ("alpha_y", self.alpha_y),
            ("beta_x", self.beta_x),
            ("beta_y", self.beta_y),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(HypothesesError::InvalidConstant { name, value });
            }
        }
        Ok(self)
    }
}

/// Declared growth bounds: `|f_i(t,x,y)| <= a_i |x| + b_i |y| + c_i` and the
/// analogous affine sup-norm bounds for the functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSpec {
    pub f1_x: f64,
    pub f1_y: f64,
    pub f1_const: f64,
    pub f2_x: f64,
    pub f2_y: f64,
    pub f2_const: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub alpha_const: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    pub beta_const: f64,
}

impl GrowthSpec {
    pub fn validated(self) -> Result<Self, HypothesesError> {
        for (name, value) in [
            ("f1_x", self.f1_x),
            ("f1_y", self.f1_y),
            ("f1_const", self.f1_const),
            ("f2_x", self.f2_x),
            ("f2_y", self.f2_y),
            ("f2_const", self.f2_const),
            ("alpha_x", self.alpha_x),
            ("alpha_y", self.alpha_y),
            ("alpha_const", self.alpha_const),
            ("beta_x", self.beta_x),
            ("beta_y", self.beta_y),
            ("beta_const", self.beta_const),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(HypothesesError::InvalidConstant { name, value });
            }
        }
        Ok(self)
    }

    /// Affine offsets fed to the invariant-ball radii: `(c1 + theta*C1,
    /// c2 + theta*C2)`.
    pub fn weighted_offsets(&self, weight: &ThetaWeight) -> [f64; 2] {
        [
            self.f1_const + weight.value() * self.alpha_const,
            self.f2_const + weight.value() * self.beta_const,
        ]
    }
}

/// Carathéodory-style growth majorants: `|f_i| <= omega_i(t, |x|, |y|)` with
/// `omega_1`, `omega_2` expressions in `(t, x, y)` where `x`, `y` stand for
/// the two radii, and `|alpha| <= omega_3(|x|_sup, |y|_sup)`, `|beta| <=
/// omega_4(...)` with `omega_3`, `omega_4` expressions in `(x, y)` only.
/// All four must be nondecreasing in the radii; monotonicity is only ever
/// sample-checked, never proved.
#[derive(Debug, Clone)]
pub struct CaratheodoryGrowthSpec {
    pub omega1: ScalarExpr,
    pub omega2: ScalarExpr,
    pub omega3: ScalarExpr,
    pub omega4: ScalarExpr,
}

impl CaratheodoryGrowthSpec {
    /// Samples ordered radius pairs and checks each majorant is
    /// nondecreasing between them; returns the first violation. Monotonicity
    /// can only be falsified this way, never proved.
    pub fn falsify_monotonicity(
        &self,
        params: &Params,
        samples: usize,
        range: f64,
        seed: u64,
    ) -> Result<Option<Counterexample>, HypothesesError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let t: f64 = rng.random_range(0.0..=1.0);
            let lo = [rng.random_range(0.0..range), rng.random_range(0.0..range)];
            let hi = [
                lo[0] + rng.random_range(0.0..range),
                lo[1] + rng.random_range(0.0..range),
            ];
            for (name, omega, uses_t) in [
                ("omega1", &self.omega1, true),
                ("omega2", &self.omega2, true),
                ("omega3", &self.omega3, false),
                ("omega4", &self.omega4, false),
            ] {
                let tt = if uses_t { t } else { 0.0 };
                let at_lo = omega.eval(tt, lo[0], lo[1], params)?;
                let at_hi = omega.eval(tt, hi[0], hi[1], params)?;
                if violates(at_lo, at_hi) {
                    return Ok(Some(Counterexample {
                        inequality: format!("{name} monotonicity"),
                        witness: format!(
                            "t={tt}, radii ({}, {}) vs ({}, {})",
                            lo[0], lo[1], hi[0], hi[1]
                        ),
                        lhs: at_lo,
                        rhs: at_hi,
                    }));
                }
            }
        }
        Ok(None)
    }
}

/// The slope data shared by Lipschitz and growth declarations from which the
/// weighted coefficient matrix is assembled.
pub trait ContractionCoefficients {
    /// `[[a1, b1], [a2, b2]]`: slopes of the right-hand sides in `(x, y)`.
    fn rhs_coefficients(&self) -> [[f64; 2]; 2];
    /// `[[A1, B1], [A2, B2]]`: slopes of the functionals in the sup norms.
    fn functional_coefficients(&self) -> [[f64; 2]; 2];
}

impl ContractionCoefficients for LipschitzSpec {
    fn rhs_coefficients(&self) -> [[f64; 2]; 2] {
        [[self.f1_x, self.f1_y], [self.f2_x, self.f2_y]]
    }
    fn functional_coefficients(&self) -> [[f64; 2]; 2] {
        [[self.alpha_x, self.alpha_y], [self.beta_x, self.beta_y]]
    }
}

impl ContractionCoefficients for GrowthSpec {
    fn rhs_coefficients(&self) -> [[f64; 2]; 2] {
        [[self.f1_x, self.f1_y], [self.f2_x, self.f2_y]]
    }
    fn functional_coefficients(&self) -> [[f64; 2]; 2] {
        [[self.alpha_x, self.alpha_y], [self.beta_x, self.beta_y]]
    }
}

fn m_theta_entries<C: ContractionCoefficients + ?Sized>(coeffs: &C, theta: f64) -> [f64; 4] {
    let [[a1, b1], [a2, b2]] = coeffs.rhs_coefficients();
    let [[fa1, fb1], [fa2, fb2]] = coeffs.functional_coefficients();
    [
        (1.0 / theta).max(a1 + theta * fa1),
        b1 + theta * fb1,
        a2 + theta * fa2,
        (1.0 / theta).max(b2 + theta * fb2),
    ]
}

/// The 2x2 weighted coefficient matrix
/// `[[max(1/theta, a1 + theta*A1), b1 + theta*B1],
///   [a2 + theta*A2, max(1/theta, b2 + theta*B2)]]`.
///
/// The operator is contractive in the weighted vector norm exactly when this
/// matrix is convergent to zero; the same entries bound the growth chain in
/// the invariant-ball argument.
pub fn build_m_theta<C: ContractionCoefficients + ?Sized>(
    coeffs: &C,
    weight: &ThetaWeight,
) -> NonnegMatrix {
    NonnegMatrix::from_flat(2, m_theta_entries(coeffs, weight.value()).to_vec())
        .expect("entries of the weighted coefficient matrix are nonnegative")
}

/// Outcome of the weight search.
#[derive(Debug, Clone, Copy)]
pub struct ThetaSearch {
    pub theta: f64,
    pub rho: f64,
    pub convergent: bool,
}

/// Minimizes the spectral radius of the weighted coefficient matrix over a
/// 200-point logarithmic grid on [1e-3, 1e3], then refines around the best
/// grid point by golden-section search on the log scale.
pub fn find_theta<C: ContractionCoefficients + ?Sized>(coeffs: &C) -> ThetaSearch {
    let rho_at = |theta: f64| {
        NonnegMatrix::from_flat(2, m_theta_entries(coeffs, theta).to_vec())
            .expect("nonnegative entries")
            .spectral_radius()
    };
    let ratio = THETA_MAX / THETA_MIN;
    let grid_theta =
        |i: usize| THETA_MIN * ratio.powf(i as f64 / (THETA_GRID_POINTS - 1) as f64);
    let mut best_i = 0;
    let mut best_rho = f64::INFINITY;
    for i in 0..THETA_GRID_POINTS {
        let rho = rho_at(grid_theta(i));
        if rho < best_rho {
            best_rho = rho;
            best_i = i;
        }
    }
    let lo = grid_theta(best_i.saturating_sub(1));
    let hi = grid_theta((best_i + 1).min(THETA_GRID_POINTS - 1));
    let refined = golden_section_min(&rho_at, lo.ln(), hi.ln(), 90);
    let mut best_theta = grid_theta(best_i);
    if rho_at(refined) <= best_rho {
        best_theta = refined;
    }
    // Recompute so the reported rho is exactly the radius at the returned
    // weight, not a cached intermediate.
    let rho = rho_at(best_theta);
    ThetaSearch {
        theta: best_theta,
        rho,
        convergent: rho < 1.0 - DEFAULT_BOUNDARY_BAND,
    }
}

/// Golden-section minimizer on `[log_lo, log_hi]`; `f` takes the exponential
/// of the search variable. The radius is piecewise smooth in the weight and
/// the bracket spans one grid cell, where it is close to unimodal.
fn golden_section_min(f: &impl Fn(f64) -> f64, log_lo: f64, log_hi: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (log_lo, log_hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d.exp());
        }
    }
    if fc <= fd {
        c.exp()
    } else {
        d.exp()
    }
}

/// Sufficient 2x2 test: every row sum below 1 forces the spectral radius
/// below 1. The converse fails, so `false` here decides nothing.
pub fn row_sum_sufficient_check(m: &NonnegMatrix) -> Result<bool, MatrixError> {
    if m.dim() != 2 {
        return Err(MatrixError::DimensionMismatch {
            expected: 2,
            got: m.dim(),
        });
    }
    Ok((0..2).all(|i| m.entry(i, 0) + m.entry(i, 1) < 1.0))
}

/// Invariant-ball radii `(R1, R2) = (I - M)^{-1} (c1 + theta*C1, c2 +
/// theta*C2)`: the smallest product ball the operator maps into itself under
/// the declared growth bounds. Requires the weighted matrix to be convergent
/// to zero; inverse positivity then keeps both radii nonnegative.
pub fn schauder_radii(
    growth: &GrowthSpec,
    weight: &ThetaWeight,
) -> Result<[f64; 2], HypothesesError> {
    let m = build_m_theta(growth, weight);
    let report = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)?;
    if report.verdict != Verdict::Convergent {
        return Err(HypothesesError::NotConvergent {
            rho: report.spectral_radius,
        });
    }
    let inv = m
        .inverse_i_minus()
        .expect("convergent verdict guarantees a nonsingular I - M");
    let offsets = growth.weighted_offsets(weight);
    Ok([
        (inv[0][0] * offsets[0] + inv[0][1] * offsets[1]).max(0.0),
        (inv[1][0] * offsets[0] + inv[1][1] * offsets[1]).max(0.0),
    ])
}

/// Outcome of the sampled invariant-ball check.
#[derive(Debug, Clone)]
pub enum BallInvariance {
    Holds,
    /// A sampled state inside the ball whose image leaves it.
    Violated(Box<SystemState>),
}

impl BallInvariance {
    pub fn holds(&self) -> bool {
        matches!(self, BallInvariance::Holds)
    }
}

/// Samples random states with weighted norms inside `(R1, R2)` (random
/// trigonometric polynomials scaled into the ball) and checks that their
/// images stay inside, up to 1e-9 slack. Deterministic for a fixed seed.
pub fn ball_invariance_check(
    p: &ProblemSpec,
    radii: [f64; 2],
    samples: usize,
    seed: u64,
) -> Result<BallInvariance, HypothesesError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let first = random_state_in_ball(p.n_intervals, radii[0], &p.theta, &mut rng)?;
        let second = random_state_in_ball(p.n_intervals, radii[1], &p.theta, &mut rng)?;
        let u = SystemState::new(first, second)?;
        let image = apply_t(&u, p)?;
        let norms = image.weighted_norms(&p.theta);
        if norms[0] > radii[0] + 1e-9 || norms[1] > radii[1] + 1e-9 {
            return Ok(BallInvariance::Violated(Box::new(u)));
        }
    }
    Ok(BallInvariance::Holds)
}

/// Random trigonometric polynomial plus scalar, rescaled so the weighted norm
/// is uniform in `[0, radius]`.
fn random_state_in_ball(
    n_intervals: usize,
    radius: f64,
    weight: &ThetaWeight,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedState, SpaceError> {
    let func = random_trig_poly(n_intervals, 1.0, rng)?;
    let scalar: f64 = rng.random_range(-1.0..1.0);
    let raw = AugmentedState::new(func, scalar)?;
    let norm = raw.weighted_norm(weight);
    let target = radius * rng.random::<f64>();
    let scale = if norm > 0.0 { target / norm } else { 0.0 };
    AugmentedState::new(raw.func().map(|v| v * scale)?, raw.scalar() * scale)
}

/// Smooth random function: constant plus four harmonics with coefficients
/// uniform in `[-amplitude, amplitude]`.
fn random_trig_poly(
    n_intervals: usize,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> Result<GridFunction, SpaceError> {
    let mut coefs = [0.0f64; 9];
    for c in coefs.iter_mut() {
        *c = rng.random_range(-amplitude..amplitude);
    }
    GridFunction::from_fn(n_intervals, |t| {
        let mut v = coefs[0];
        for k in 1..=4usize {
            let w = 2.0 * std::f64::consts::PI * k as f64 * t;
            v += coefs[2 * k - 1] * w.cos() + coefs[2 * k] * w.sin();
        }
        v
    })
}

/// Result of the monotone-map a-priori bound.
#[derive(Debug, Clone)]
pub struct AprioriBound {
    /// Limit of the monotone iteration when it settles below the cap and the
    /// grid sweep finds no self-mapped point above it; `None` when the sweep
    /// contradicts the iterated limit inside the explored region.
    pub bound: Option<[f64; 2]>,
    /// A sweep point satisfying the self-mapping inequalities yet exceeding
    /// the iterated limit, when one exists.
    pub sweep_violation: Option<[f64; 2]>,
    /// Always true: the quantifier over all radii is only ever verified on
    /// the capped region, never globally.
    pub certified_region_only: bool,
}

/// Iterates the monotone map
/// `Phi(r) = (int_0^1 omega1(s, r) ds + omega3(r), int_0^1 omega2(s, r) ds + omega4(r))`
/// from `(0, 0)`. If the iterates settle (Cauchy) below `cap`, their limit
/// dominates every radius pair `r <= Phi(r)` reachable from below; a grid
/// sweep over `[0, cap]^2` then looks for self-mapped points outside the
/// bound, which would disprove it on the explored region.
pub fn apriori_bound(
    spec: &CaratheodoryGrowthSpec,
    params: &Params,
    cap: [f64; 2],
    grid: usize,
) -> Result<AprioriBound, HypothesesError> {
    if !(cap[0] > 0.0 && cap[1] > 0.0) {
        return Err(HypothesesError::InvalidCap { cap });
    }
    let phi = |r: [f64; 2]| -> Result<[f64; 2], HypothesesError> {
        Ok([
            integrate_omega(&spec.omega1, r, params)? + spec.omega3.eval(0.0, r[0], r[1], params)?,
            integrate_omega(&spec.omega2, r, params)? + spec.omega4.eval(0.0, r[0], r[1], params)?,
        ])
    };
    let mut r = [0.0f64; 2];
    let mut limit = None;
    for _ in 0..APRIORI_ITERATION_CAP {
        let next = phi(r)?;
        if next[0] > cap[0] || next[1] > cap[1] {
            return Err(HypothesesError::NoBoundFound { at: next });
        }
        let gap = (next[0] - r[0]).abs().max((next[1] - r[1]).abs());
        let scale = 1.0 + r[0].abs().max(r[1].abs());
        r = next;
        if gap <= 1e-10 * scale {
            limit = Some(r);
            break;
        }
    }
    let Some(bound) = limit else {
        return Err(HypothesesError::NoBoundFound { at: r });
    };
    // Sweep the capped region for self-mapped points the iteration missed.
    let slack = [1e-6 * (1.0 + bound[0]), 1e-6 * (1.0 + bound[1])];
    let mut sweep_violation = None;
    'sweep: for i in 0..=grid {
        for j in 0..=grid {
            let point = [
                cap[0] * i as f64 / grid as f64,
                cap[1] * j as f64 / grid as f64,
            ];
            let image = phi(point)?;
            let self_mapped = point[0] <= image[0] + 1e-12 && point[1] <= image[1] + 1e-12;
            if self_mapped && (point[0] > bound[0] + slack[0] || point[1] > bound[1] + slack[1]) {
                sweep_violation = Some(point);
                break 'sweep;
            }
        }
    }
    Ok(AprioriBound {
        bound: if sweep_violation.is_none() {
            Some(bound)
        } else {
            None
        },
        sweep_violation,
        certified_region_only: true,
    })
}

fn integrate_omega(
    omega: &ScalarExpr,
    r: [f64; 2],
    params: &Params,
) -> Result<f64, HypothesesError> {
    let n = APRIORI_QUADRATURE_INTERVALS;
    let h = 1.0 / n as f64;
    let mut acc = 0.0;
    let mut prev = omega.eval(0.0, r[0], r[1], params)?;
    for i in 1..=n {
        let cur = omega.eval(i as f64 * h, r[0], r[1], params)?;
        acc += 0.5 * h * (prev + cur);
        prev = cur;
    }
    Ok(acc)
}

/// Which family of declared constants to attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FalsifyKind {
    Lipschitz,
    Growth,
}

/// A sample that violates a declared inequality.
#[derive(Debug, Clone)]
pub struct Counterexample {
    /// Which declared inequality failed, e.g. "f1 Lipschitz bound".
    pub inequality: String,
    /// The witnessing sample, formatted.
    pub witness: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Samples random points `(t, x, y, xb, yb)` in a box and random
/// grid-function pairs, checking the declared inequalities; returns the
/// first violating sample. A `None` result falsifies nothing beyond the
/// samples tried; it is not a proof.
///
/// A quarter of the point samples are targeted at tiny `|x|` and a quarter
/// at tiny `|y|` with nearby partner points, which is where difference
/// quotients of oscillating right-hand sides like `x*sin(y/x)` blow up.
pub fn falsify_constants(
    p: &ProblemSpec,
    kind: FalsifyKind,
    samples: usize,
    range: f64,
    seed: u64,
) -> Result<Option<Counterexample>, HypothesesError> {
    match kind {
        FalsifyKind::Lipschitz if p.declared_lipschitz.is_none() => {
            return Err(HypothesesError::MissingDeclaration { kind: "lipschitz" });
        }
        FalsifyKind::Growth if p.declared_growth.is_none() => {
            return Err(HypothesesError::MissingDeclaration { kind: "growth" });
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let (t, x, y, xb, yb) = match s % 4 {
            0 | 1 => (
                rng.random_range(0.0..=1.0),
                rng.random_range(-range..range),
                rng.random_range(-range..range),
                rng.random_range(-range..range),
                rng.random_range(-range..range),
            ),
            2 => oscillation_probe(&mut rng, range, true),
            _ => oscillation_probe(&mut rng, range, false),
        };
        if let Some(cx) = check_point_sample(p, kind, t, x, y, xb, yb)? {
            return Ok(Some(cx));
        }
        // Grid-function pairs are costlier to generate; probe the functional
        // bounds on a subsample.
        if s % 8 == 0 {
            if let Some(cx) = check_functional_sample(p, kind, range, &mut rng)? {
                return Ok(Some(cx));
            }
        }
    }
    Ok(None)
}

/// Point pair hugging the singular axis: one coordinate tiny, its partner a
/// short step away, the other coordinate moderate and shared. Ratios `y/x`
/// up to 1e8 make any finite declared slope falsifiable when the true
/// difference quotient oscillates.
fn oscillation_probe(
    rng: &mut ChaCha8Rng,
    range: f64,
    small_x: bool,
) -> (f64, f64, f64, f64, f64) {
    let t = rng.random_range(0.0..=1.0);
    let big_sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let small_sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let big = big_sign * rng.random_range(0.5..range.clamp(1.0, 100.0));
    let log_ratio: f64 = rng.random_range(2.0..8.0);
    let small = small_sign * big.abs() / 10f64.powf(log_ratio);
    let step = small.abs() * 10f64.powf(-log_ratio) * rng.random_range(0.01..0.3);
    if small_x {
        (t, small, big, small + step, big)
    } else {
        (t, big, small, big, small + step)
    }
}

fn violates(lhs: f64, rhs: f64) -> bool {
    lhs > rhs * (1.0 + 1e-10) + 1e-10
}

fn check_point_sample(
    p: &ProblemSpec,
    kind: FalsifyKind,
    t: f64,
    x: f64,
    y: f64,
    xb: f64,
    yb: f64,
) -> Result<Option<Counterexample>, HypothesesError> {
    let f1 = p.f1.eval(t, x, y, &p.params)?;
    let f2 = p.f2.eval(t, x, y, &p.params)?;
    match kind {
        FalsifyKind::Lipschitz => {
            let l = p.declared_lipschitz.as_ref().expect("checked by caller");
            let f1b = p.f1.eval(t, xb, yb, &p.params)?;
            let f2b = p.f2.eval(t, xb, yb, &p.params)?;
            let (dx, dy) = ((x - xb).abs(), (y - yb).abs());
            for (name, lhs, rhs) in [
                ("f1 Lipschitz bound", (f1 - f1b).abs(), l.f1_x * dx + l.f1_y * dy),
                ("f2 Lipschitz bound", (f2 - f2b).abs(), l.f2_x * dx + l.f2_y * dy),
            ] {
                if violates(lhs, rhs) {
                    return Ok(Some(Counterexample {
                        inequality: name.into(),
                        witness: format!("t={t}, x={x}, y={y}, xb={xb}, yb={yb}"),
                        lhs,
                        rhs,
                    }));
                }
            }
        }
        FalsifyKind::Growth => {
            let g = p.declared_growth.as_ref().expect("checked by caller");
            for (name, lhs, rhs) in [
                (
                    "f1 growth bound",
                    f1.abs(),
                    g.f1_x * x.abs() + g.f1_y * y.abs() + g.f1_const,
                ),
                (
                    "f2 growth bound",
                    f2.abs(),
                    g.f2_x * x.abs() + g.f2_y * y.abs() + g.f2_const,
                ),
            ] {
                if violates(lhs, rhs) {
                    return Ok(Some(Counterexample {
                        inequality: name.into(),
                        witness: format!("t={t}, x={x}, y={y}"),
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn check_functional_sample(
    p: &ProblemSpec,
    kind: FalsifyKind,
    range: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Counterexample>, HypothesesError> {
    let scale = range / 4.0;
    let x = random_trig_poly(p.n_intervals, scale, rng)?;
    let y = random_trig_poly(p.n_intervals, scale, rng)?;
    let alpha = p.alpha.eval(&x, &y, &p.params)?;
    let beta = p.beta.eval(&x, &y, &p.params)?;
    match kind {
        FalsifyKind::Lipschitz => {
            let l = p.declared_lipschitz.as_ref().expect("checked by caller");
            let xb = random_trig_poly(p.n_intervals, scale, rng)?;
            let yb = random_trig_poly(p.n_intervals, scale, rng)?;
            let alphab = p.alpha.eval(&xb, &yb, &p.params)?;
            let betab = p.beta.eval(&xb, &yb, &p.params)?;
            let dx = sup_diff(&x, &xb);
            let dy = sup_diff(&y, &yb);
            for (name, lhs, rhs) in [
                (
                    "alpha Lipschitz bound",
                    (alpha - alphab).abs(),
                    l.alpha_x * dx + l.alpha_y * dy,
                ),
                (
                    "beta Lipschitz bound",
                    (beta - betab).abs(),
                    l.beta_x * dx + l.beta_y * dy,
                ),
            ] {
                if violates(lhs, rhs) {
                    return Ok(Some(Counterexample {
                        inequality: name.into(),
                        witness: "random trigonometric function pair".into(),
                        lhs,
                        rhs,
                    }));
                }
            }
        }
        FalsifyKind::Growth => {
            let g = p.declared_growth.as_ref().expect("checked by caller");
            for (name, lhs, rhs) in [
                (
                    "alpha growth bound",
                    alpha.abs(),
                    g.alpha_x * x.sup_norm() + g.alpha_y * y.sup_norm() + g.alpha_const,
                ),
                (
                    "beta growth bound",
                    beta.abs(),
                    g.beta_x * x.sup_norm() + g.beta_y * y.sup_norm() + g.beta_const,
                ),
            ] {
                if violates(lhs, rhs) {
                    return Ok(Some(Counterexample {
                        inequality: name.into(),
                        witness: "random trigonometric function".into(),
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}
