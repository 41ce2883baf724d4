//! Certified fixed-point solving of coupled first-order ODE systems whose
//! initial values are nonlinear functionals of the whole solution,
//!
//! ```text
//! x'(t) = f1(t, x(t), y(t)),   x(0) = alpha[x, y],
//! y'(t) = f2(t, x(t), y(t)),   y(0) = beta[x, y],     t in [0, 1].
//! ```
//!
//! The system is recast as a fixed-point problem for an operator on pairs
//! (function, scalar), measured componentwise in a weighted vector norm.
//! When declared Lipschitz constants make the associated 2x2 coefficient
//! matrix convergent to zero, the iteration carries a componentwise error
//! certificate; under mere growth bounds the solver runs uncertified inside
//! an invariant ball. An independent shooting reference (one-step
//! integration plus Newton on the initial values) cross-checks everything.
//!
//! Module map:
//! - [`matrix`]: nonnegative matrices, convergent-to-zero criteria,
//!   geometric-series inverses, perturbation margins.
//! - [`expr`]: the expression grammar for right-hand sides and functionals.
//! - [`space`]: grid functions, augmented states, weighted vector distance.
//! - [`operator`]: the fixed-point operator and defect residuals.
//! - [`hypotheses`]: coefficient matrices, weight search, invariant-ball
//!   radii, a-priori bounds, and falsification of declared constants.
//! - [`solver`]: certified and plain fixed-point iteration.
//! - [`oracle`]: the independent shooting reference solver.

pub mod expr;
pub mod hypotheses;
pub mod matrix;
pub mod operator;
pub mod oracle;
pub mod solver;
pub mod space;

pub use expr::{FunctionalExpr, Params, ScalarExpr};
pub use matrix::{ConvergenceReport, NonnegMatrix, Verdict};
pub use operator::{ProblemSpec, Residuals};
pub use solver::{PerovCertificate, SolveResult};
pub use space::{AugmentedState, GridFunction, SystemState, ThetaWeight};
