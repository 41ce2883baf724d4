//! Independent reference solver: integrate the system as a plain initial
//! value problem from trial initial values `(a, b)` with classical
//! fourth-order steps, then root-find on the nonlocal conditions
//! `a = alpha[x, y]`, `b = beta[x, y]` with a damped Newton method.
//!
//! This path never touches the fixed-point operator or the contraction
//! solver; it exists to cross-check them. Keep it that way.

use crate::expr::EvalError;
use crate::operator::ProblemSpec;
use crate::space::{AugmentedState, GridFunction, SpaceError, SystemState};
use thiserror::Error;

const NEWTON_STEP_CAP: usize = 50;
const ARMIJO_SLOPE: f64 = 1e-4;
const MIN_DAMPING: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("trajectory left the finite range at step {step}")]
    NonFiniteState { step: usize },
    #[error(
        "no root of the nonlocal conditions found after {starts_tried} start(s); \
         best residual {best:.3e}"
    )]
    NoRoot { starts_tried: usize, best: f64 },
    #[error("tolerance {tol} must be positive and finite")]
    InvalidTolerance { tol: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A root of the nonlocal conditions found by shooting.
#[derive(Debug, Clone)]
pub struct ShootResult {
    /// The initial values `(a, b)` the trajectory was launched from.
    pub initial: [f64; 2],
    pub x: GridFunction,
    pub y: GridFunction,
    /// `(alpha[x,y] - a, beta[x,y] - b)` at the returned root.
    pub mismatch: [f64; 2],
    pub newton_steps: usize,
}

impl ShootResult {
    /// Repackages the trajectory as a solver-comparable state.
    pub fn system_state(&self) -> Result<SystemState, SpaceError> {
        SystemState::new(
            AugmentedState::new(self.x.clone(), self.initial[0])?,
            AugmentedState::new(self.y.clone(), self.initial[1])?,
        )
    }
}

/// Classical fourth-order one-step integration of the system on the problem
/// grid from `(x(0), y(0)) = (a, b)`.
pub fn integrate_ivp(
    p: &ProblemSpec,
    a: f64,
    b: f64,
) -> Result<(GridFunction, GridFunction), OracleError> {
    let n = p.n_intervals;
    let h = 1.0 / n as f64;
    let f = |t: f64, x: f64, y: f64| -> Result<(f64, f64), EvalError> {
        Ok((
            p.f1.eval(t, x, y, &p.params)?,
            p.f2.eval(t, x, y, &p.params)?,
        ))
    };
    let mut xs = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (a, b);
    xs.push(x);
    ys.push(y);
    for i in 0..n {
        let t = i as f64 * h;
        let (k1x, k1y) = f(t, x, y)?;
        let (k2x, k2y) = f(t + 0.5 * h, x + 0.5 * h * k1x, y + 0.5 * h * k1y)?;
        let (k3x, k3y) = f(t + 0.5 * h, x + 0.5 * h * k2x, y + 0.5 * h * k2y)?;
        let (k4x, k4y) = f(t + h, x + h * k3x, y + h * k3y)?;
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        if !x.is_finite() || !y.is_finite() {
            return Err(OracleError::NonFiniteState { step: i + 1 });
        }
        xs.push(x);
        ys.push(y);
    }
    Ok((GridFunction::from_values(xs)?, GridFunction::from_values(ys)?))
}

/// Mismatch of the nonlocal conditions along the trajectory from `(a, b)`.
fn shoot(
    p: &ProblemSpec,
    a: f64,
    b: f64,
) -> Result<([f64; 2], GridFunction, GridFunction), OracleError> {
    let (x, y) = integrate_ivp(p, a, b)?;
    let fa = p.alpha.eval(&x, &y, &p.params)? - a;
    let fb = p.beta.eval(&x, &y, &p.params)? - b;
    Ok(([fa, fb], x, y))
}

fn inf_norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Damped Newton iteration from one start; `None` when the start leads
/// nowhere (blow-up, singular Jacobian, stalled line search, step cap).
fn newton_from(
    p: &ProblemSpec,
    start: [f64; 2],
    tol: f64,
    best_seen: &mut f64,
) -> Option<ShootResult> {
    let eval = |a: f64, b: f64| shoot(p, a, b).ok();
    let (mut f, mut x, mut y) = eval(start[0], start[1])?;
    let (mut a, mut b) = (start[0], start[1]);
    for step in 0..NEWTON_STEP_CAP {
        let norm = inf_norm(f);
        *best_seen = best_seen.min(norm);
        if norm <= tol {
            return Some(ShootResult {
                initial: [a, b],
                x,
                y,
                mismatch: f,
                newton_steps: step,
            });
        }
        // Forward-difference Jacobian: two extra integrations per step.
        let da = 1e-6 * (1.0 + a.abs());
        let db = 1e-6 * (1.0 + b.abs());
        let (fa, _, _) = eval(a + da, b)?;
        let (fb, _, _) = eval(a, b + db)?;
        let j = [
            [(fa[0] - f[0]) / da, (fb[0] - f[0]) / db],
            [(fa[1] - f[1]) / da, (fb[1] - f[1]) / db],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let j_scale = j.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        if det.abs() <= 1e-14 * (1.0 + j_scale * j_scale) {
            return None;
        }
        let delta = [
            (-f[0] * j[1][1] + f[1] * j[0][1]) / det,
            (-f[1] * j[0][0] + f[0] * j[1][0]) / det,
        ];
        // Backtracking on the residual norm.
        let mut lambda = 1.0;
        loop {
            let trial = (a + lambda * delta[0], b + lambda * delta[1]);
            if let Some((ft, xt, yt)) = eval(trial.0, trial.1) {
                if inf_norm(ft) <= (1.0 - ARMIJO_SLOPE * lambda) * norm {
                    (a, b) = trial;
                    (f, x, y) = (ft, xt, yt);
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < MIN_DAMPING {
                return None;
            }
        }
    }
    let norm = inf_norm(f);
    *best_seen = best_seen.min(norm);
    if norm <= tol {
        return Some(ShootResult {
            initial: [a, b],
            x,
            y,
            mismatch: f,
            newton_steps: NEWTON_STEP_CAP,
        });
    }
    None
}

/// Solves the nonlocal conditions by shooting: damped Newton from `start`,
/// then, if that fails, from a deterministic 5x5 grid of starts covering
/// the invariant ball when growth constants provide one (a fixed box
/// otherwise). The first success wins.
pub fn solve_nonlocal(
    p: &ProblemSpec,
    start: [f64; 2],
    tol: f64,
) -> Result<ShootResult, OracleError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(OracleError::InvalidTolerance { tol });
    }
    let mut best = f64::INFINITY;
    let mut tried = 0;
    if let Some(found) = {
        tried += 1;
        newton_from(p, start, tol, &mut best)
    } {
        return Ok(found);
    }
    let radii = p
        .declared_growth
        .as_ref()
        .and_then(|g| crate::hypotheses::schauder_radii(g, &p.theta).ok())
        .unwrap_or([10.0, 10.0]);
    for i in 0..5 {
        for j in 0..5 {
            let grid_start = [
                -radii[0] + radii[0] * i as f64 / 2.0,
                -radii[1] + radii[1] * j as f64 / 2.0,
            ];
            tried += 1;
            if let Some(found) = newton_from(p, grid_start, tol, &mut best) {
                return Ok(found);
            }
        }
    }
    Err(OracleError::NoRoot {
        starts_tried: tried,
        best,
    })
}
