//! Fixed-point solvers on system states: certified contraction iteration
//! (componentwise matrix error bounds) and plain successive approximation
//! for problems that only carry growth hypotheses.
//!
//! The certified mode stops on the a-posteriori bound
//! `(I - M)^{-1} d(u_k, u_{k+1})`, which dominates the distance from both
//! `u_k` and `u_{k+1}` to the unique fixed point. The a-priori form
//! `M^k (I - M)^{-1} d(u_0, u_1)` is reported alongside; the a-posteriori
//! bound never exceeds it (up to roundoff) because the step distances
//! contract under `M^k`.

use crate::matrix::{NonnegMatrix, Verdict, DEFAULT_BOUNDARY_BAND};
use crate::operator::{apply_t, residual, OperatorError, ProblemSpec, Residuals};
use crate::space::{SpaceError, SystemState, ThetaWeight};
use thiserror::Error;

/// Weighted-norm ceiling beyond which an uncertified iteration is declared
/// divergent.
const DIVERGENCE_CEILING: f64 = 1e12;

/// Default slack separating the discrete certificate from the continuum
/// solution: the certificate is exact for the grid operator, quadrature
/// contributes O(h^2) on top (about 1e-6 at 1024 intervals; 1e-5 leaves
/// margin for constants).
pub const DEFAULT_DISCRETIZATION_ALLOWANCE: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no Lipschitz constants declared; the certified solver requires them")]
    MissingLipschitz,
    #[error("the weighted coefficient matrix is not convergent to zero (spectral radius {rho}); \
             no contraction certificate exists")]
    NotContractive { rho: f64 },
    #[error("iteration diverged at step {iteration} (weighted norm {norm:.3e})")]
    Diverged { iteration: usize, norm: f64 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Matrix(#[from] crate::matrix::MatrixError),
}

/// Componentwise error certificate for a contraction solve.
#[derive(Debug, Clone)]
pub struct PerovCertificate {
    /// The weighted coefficient matrix the contraction was certified with.
    pub matrix: NonnegMatrix,
    /// Number of operator applications performed.
    pub iterations: usize,
    /// `M^(k-1) (I - M)^{-1} d(u_0, u_1)`: the contraction bound anchored at
    /// the start, evaluated for the last completed step.
    pub apriori_bound: [f64; 2],
    /// `(I - M)^{-1} d(u_{k-1}, u_k)`: the bound anchored at the final step;
    /// valid for the returned state and never above the a-priori form.
    pub aposteriori_bound: [f64; 2],
    /// Weight used by the vector norm underlying both bounds.
    pub theta: f64,
}

/// Outcome of a solve, certified or not.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub state: SystemState,
    pub certificate: Option<PerovCertificate>,
    pub residuals: Residuals,
    pub iterations: usize,
    pub converged: bool,
    /// For uncertified solves with declared growth bounds: whether every
    /// iterate stayed inside the invariant ball. `None` when no radii exist.
    pub stayed_in_ball: Option<bool>,
}

fn apply_inverse(inv: &[Vec<f64>], v: [f64; 2]) -> [f64; 2] {
    [
        inv[0][0] * v[0] + inv[0][1] * v[1],
        inv[1][0] * v[0] + inv[1][1] * v[1],
    ]
}

/// Certified contraction iteration from `u0`.
///
/// Requires declared Lipschitz constants whose weighted matrix is convergent
/// to zero. Stops once the a-posteriori bound is componentwise below `tol`
/// or when `max_iter` applications are exhausted (the latter returns the
/// best state with `converged = false` rather than an error).
pub fn perov_solve(
    p: &ProblemSpec,
    u0: &SystemState,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult, SolverError> {
    let lipschitz = p.declared_lipschitz.ok_or(SolverError::MissingLipschitz)?;
    let m = crate::hypotheses::build_m_theta(&lipschitz, &p.theta);
    let report = m.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)?;
    if report.verdict != Verdict::Convergent {
        return Err(SolverError::NotContractive {
            rho: report.spectral_radius,
        });
    }
    let inv = m
        .inverse_i_minus()
        .expect("convergent verdict guarantees a nonsingular I - M");

    let mut u = u0.clone();
    let mut first_step: Option<[f64; 2]> = None;
    let mut aposteriori = [f64::INFINITY; 2];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter.max(1) {
        let next = apply_t(&u, p)?;
        iterations += 1;
        let step = u.vector_distance(&next, &p.theta)?;
        if first_step.is_none() {
            first_step = Some(step);
        }
        aposteriori = apply_inverse(&inv, step);
        u = next;
        if aposteriori[0] <= tol && aposteriori[1] <= tol {
            converged = true;
            break;
        }
    }

    let d0 = first_step.expect("at least one application ran");
    let start_bound = apply_inverse(&inv, d0);
    let apriori_vec = m.power((iterations - 1) as u32).mat_vec(&start_bound);
    let apriori_bound = [apriori_vec[0], apriori_vec[1]];
    debug_assert!(
        aposteriori[0] <= apriori_bound[0] + 1e-9 && aposteriori[1] <= apriori_bound[1] + 1e-9,
        "a-posteriori bound {aposteriori:?} exceeds a-priori bound {apriori_bound:?}"
    );

    let residuals = residual(&u, p)?;
    Ok(SolveResult {
        state: u,
        certificate: Some(PerovCertificate {
            matrix: m,
            iterations,
            apriori_bound,
            aposteriori_bound: aposteriori,
            theta: p.theta.value(),
        }),
        residuals,
        iterations,
        converged,
        stayed_in_ball: None,
    })
}

/// Plain successive approximation from `u0`, without a certificate.
///
/// Stops when consecutive iterates are componentwise closer than `tol` in
/// the weighted distance. Existence theory guarantees nothing about this
/// iteration, so divergence (weighted norm beyond 1e12) is a reported error
/// and exhausting `max_iter` a reported non-convergence, not a bug. When
/// growth constants are declared and yield invariant-ball radii, the result
/// also reports whether every iterate stayed inside that ball.
pub fn picard_solve(
    p: &ProblemSpec,
    u0: &SystemState,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult, SolverError> {
    let radii = p
        .declared_growth
        .as_ref()
        .and_then(|g| crate::hypotheses::schauder_radii(g, &p.theta).ok());
    let in_ball = |state: &SystemState, r: &[f64; 2]| {
        let norms = state.weighted_norms(&p.theta);
        norms[0] <= r[0] + 1e-9 && norms[1] <= r[1] + 1e-9
    };
    let mut stayed_in_ball = radii.as_ref().map(|r| in_ball(u0, r));

    let mut u = u0.clone();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter.max(1) {
        let next = apply_t(&u, p)?;
        iterations += 1;
        let norms = next.weighted_norms(&p.theta);
        let worst = norms[0].max(norms[1]);
        if worst > DIVERGENCE_CEILING {
            return Err(SolverError::Diverged {
                iteration: iterations,
                norm: worst,
            });
        }
        if let (Some(r), Some(flag)) = (radii.as_ref(), stayed_in_ball.as_mut()) {
            *flag = *flag && in_ball(&next, r);
        }
        let step = u.vector_distance(&next, &p.theta)?;
        u = next;
        if step[0] <= tol && step[1] <= tol {
            converged = true;
            break;
        }
    }

    let residuals = residual(&u, p)?;
    Ok(SolveResult {
        state: u,
        certificate: None,
        residuals,
        iterations,
        converged,
        stayed_in_ball,
    })
}

/// True when the solved state agrees with an independently computed state to
/// within the a-posteriori bound plus a discretization allowance. Returns
/// false for uncertified results.
pub fn certificate_check(
    r: &SolveResult,
    oracle_state: &SystemState,
    allowance: f64,
) -> Result<bool, SpaceError> {
    let Some(cert) = &r.certificate else {
        return Ok(false);
    };
    let weight = ThetaWeight::new(cert.theta)?;
    let d = r.state.vector_distance(oracle_state, &weight)?;
    Ok(d[0] <= cert.aposteriori_bound[0] + allowance
        && d[1] <= cert.aposteriori_bound[1] + allowance)
}
