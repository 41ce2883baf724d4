//! The fixed-point operator behind the solver: maps a state `((x,a),(y,b))`
//! to `((a + int_0^t f1, alpha[x,y]), (b + int_0^t f2, beta[x,y]))` on the
//! grid, plus defect residuals that measure how well a candidate state
//! satisfies the differential system and its nonlocal conditions directly.

use crate::expr::{EvalError, FunctionalExpr, Params, ScalarExpr};
use crate::hypotheses::{GrowthSpec, LipschitzSpec};
use crate::space::{AugmentedState, GridFunction, SpaceError, SystemState, ThetaWeight};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("grid has {n} intervals; it must be a positive multiple of 4")]
    BadGrid { n: usize },
    #[error("tolerance {tol} must be positive and finite")]
    BadTolerance { tol: f64 },
    #[error("expressions reference unbound parameters: {names:?}")]
    UnboundParameters { names: Vec<String> },
}

/// Full description of one problem instance: dynamics, functionals,
/// parameters, grid, weight, tolerance, and any declared constants.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub f1: ScalarExpr,
    pub f2: ScalarExpr,
    pub alpha: FunctionalExpr,
    pub beta: FunctionalExpr,
    pub params: Params,
    pub n_intervals: usize,
    pub theta: ThetaWeight,
    pub tolerance: f64,
    pub declared_lipschitz: Option<LipschitzSpec>,
    pub declared_growth: Option<GrowthSpec>,
}

impl ProblemSpec {
    /// Checks the structural invariants: grid a positive multiple of 4,
    /// positive tolerance, and every referenced parameter bound.
    pub fn validate(&self) -> Result<(), OperatorError> {
        if self.n_intervals == 0 || !self.n_intervals.is_multiple_of(4) {
            return Err(OperatorError::BadGrid {
                n: self.n_intervals,
            });
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(OperatorError::BadTolerance {
                tol: self.tolerance,
            });
        }
        let mut referenced = BTreeSet::new();
        self.f1.collect_params(&mut referenced);
        self.f2.collect_params(&mut referenced);
        self.alpha.collect_params(&mut referenced);
        self.beta.collect_params(&mut referenced);
        let missing: Vec<String> = referenced
            .into_iter()
            .filter(|name| !self.params.contains_key(name))
            .collect();
        if !missing.is_empty() {
            return Err(OperatorError::UnboundParameters { names: missing });
        }
        Ok(())
    }

    pub fn zero_state(&self) -> Result<SystemState, SpaceError> {
        SystemState::zero(self.n_intervals)
    }

    fn eval_rhs(
        &self,
        expr: &ScalarExpr,
        x: &GridFunction,
        y: &GridFunction,
    ) -> Result<GridFunction, OperatorError> {
        let n = x.n_intervals();
        let mut values = Vec::with_capacity(n + 1);
        for i in 0..=n {
            values.push(expr.eval(
                x.node(i),
                x.value_at_node(i),
                y.value_at_node(i),
                &self.params,
            )?);
        }
        Ok(GridFunction::from_values(values)?)
    }
}

/// Cumulative composite trapezoid sums: `out(t_i) = sum_{j<i} h/2 (g_j + g_{j+1})`,
/// with `out(0) = 0`. Second-order accurate for twice differentiable
/// integrands and exact on linear ones.
pub fn cumulative_integral(g: &GridFunction) -> GridFunction {
    let n = g.n_intervals();
    let h = g.step();
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for j in 0..n {
        acc += 0.5 * h * (g.value_at_node(j) + g.value_at_node(j + 1));
        out.push(acc);
    }
    GridFunction::from_values(out).expect("cumulative sums of finite values stay finite")
}

/// One application of the fixed-point operator to `u` under problem `p`.
///
/// The right-hand sides are sampled at the grid nodes using the current node
/// values of `x` and `y`; integrals are cumulative trapezoid sums (monotone
/// in the integrand, which is what lets the contraction estimate survive
/// discretization without any slack).
pub fn apply_t(u: &SystemState, p: &ProblemSpec) -> Result<SystemState, OperatorError> {
    if u.n_intervals() != p.n_intervals {
        return Err(OperatorError::Space(SpaceError::GridMismatch {
            left: u.n_intervals(),
            right: p.n_intervals,
        }));
    }
    let x = u.first().func();
    let y = u.second().func();
    let a = u.first().scalar();
    let b = u.second().scalar();

    let w1 = p.eval_rhs(&p.f1, x, y)?;
    let w2 = p.eval_rhs(&p.f2, x, y)?;
    let int1 = cumulative_integral(&w1);
    let int2 = cumulative_integral(&w2);

    let first_func = int1.map(|v| a + v)?;
    let second_func = int2.map(|v| b + v)?;
    let first_scalar = p.alpha.eval(x, y, &p.params)?;
    let second_scalar = p.beta.eval(x, y, &p.params)?;

    Ok(SystemState::new(
        AugmentedState::new(first_func, first_scalar)?,
        AugmentedState::new(second_func, second_scalar)?,
    )?)
}

/// Defect of a candidate state measured against the problem itself.
#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    /// Max over nodes of |x' - f1(t,x,y)| (second-order difference stencils).
    pub ode1: f64,
    /// Max over nodes of |y' - f2(t,x,y)|.
    pub ode2: f64,
    /// |x(0) - alpha[x,y]|.
    pub nl1: f64,
    /// |y(0) - beta[x,y]|.
    pub nl2: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.ode1.max(self.ode2).max(self.nl1).max(self.nl2)
    }
}

/// Nodewise numerical derivative: central differences in the interior,
/// one-sided second-order stencils at the endpoints, all O(h^2).
fn derivative(g: &GridFunction) -> Vec<f64> {
    let n = g.n_intervals();
    let h = g.step();
    let v = g.values();
    let mut out = Vec::with_capacity(n + 1);
    out.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
    for i in 1..n {
        out.push((v[i + 1] - v[i - 1]) / (2.0 * h));
    }
    out.push((3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h));
    out
}

/// Measures how well `u` satisfies the differential system and the nonlocal
/// conditions, independently of any solver.
pub fn residual(u: &SystemState, p: &ProblemSpec) -> Result<Residuals, OperatorError> {
    if u.n_intervals() != p.n_intervals {
        return Err(OperatorError::Space(SpaceError::GridMismatch {
            left: u.n_intervals(),
            right: p.n_intervals,
        }));
    }
    let x = u.first().func();
    let y = u.second().func();
    let dx = derivative(x);
    let dy = derivative(y);
    let mut ode1 = 0.0f64;
    let mut ode2 = 0.0f64;
    for i in 0..=p.n_intervals {
        let t = x.node(i);
        let f1 = p.f1.eval(t, x.value_at_node(i), y.value_at_node(i), &p.params)?;
        let f2 = p.f2.eval(t, x.value_at_node(i), y.value_at_node(i), &p.params)?;
        ode1 = ode1.max((dx[i] - f1).abs());
        ode2 = ode2.max((dy[i] - f2).abs());
    }
    let nl1 = (x.value_at_node(0) - p.alpha.eval(x, y, &p.params)?).abs();
    let nl2 = (y.value_at_node(0) - p.beta.eval(x, y, &p.params)?).abs();
    Ok(Residuals {
        ode1,
        ode2,
        nl1,
        nl2,
    })
}
