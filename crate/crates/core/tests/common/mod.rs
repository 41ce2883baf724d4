//! Shared fixtures: the two shipped example problems.

use nivp_core::expr::{parse_functional, parse_scalar, Params};
use nivp_core::hypotheses::{GrowthSpec, LipschitzSpec};
use nivp_core::operator::ProblemSpec;
use nivp_core::space::ThetaWeight;

/// Coupled sine/cosine dynamics with point-evaluation functionals; Lipschitz
/// on the whole plane, contractive for |a| < 1/4.
pub fn example_one(a: f64, n: usize) -> ProblemSpec {
    let mut params = Params::new();
    params.insert("a".into(), a);
    ProblemSpec {
        f1: parse_scalar("0.25*sin(x) + a*y + t").unwrap(),
        f2: parse_scalar("cos(a*x + 0.25*y) + 1").unwrap(),
        alpha: parse_functional("0.125*sin(x(0.25)+y(0.25))").unwrap(),
        beta: parse_functional("0.125*cos(x(0.25)+y(0.25))").unwrap(),
        params,
        n_intervals: n,
        theta: ThetaWeight::new(2.0).unwrap(),
        tolerance: 1e-8,
        declared_lipschitz: Some(example_one_lipschitz(a)),
        declared_growth: None,
    }
}

pub fn example_one_lipschitz(a: f64) -> LipschitzSpec {
    LipschitzSpec {
        f1_x: 0.25,
        f1_y: a.abs(),
        f2_x: a.abs(),
        f2_y: 0.25,
        alpha_x: 0.125,
        alpha_y: 0.125,
        beta_x: 0.125,
        beta_y: 0.125,
    }
}

/// Oscillating dynamics `x*sin(y/x)`-style: linear growth bounds but no
/// Lipschitz constants; existence only, no uniqueness certificate.
pub fn example_two(a: f64, n: usize) -> ProblemSpec {
    let mut params = Params::new();
    params.insert("a".into(), a);
    ProblemSpec {
        f1: parse_scalar("0.25*(x*sin(y/x)) + a*(y*sin(x/y)) + t").unwrap(),
        f2: parse_scalar("a*(x*sin(y/x)) + 0.25*(y*sin(x/y)) + 1").unwrap(),
        alpha: parse_functional("0.125*sin(x(0.25)+y(0.25))").unwrap(),
        beta: parse_functional("0.125*cos(x(0.25)+y(0.25))").unwrap(),
        params,
        n_intervals: n,
        theta: ThetaWeight::new(2.0).unwrap(),
        tolerance: 1e-8,
        declared_lipschitz: None,
        declared_growth: Some(example_two_growth(a)),
    }
}

pub fn example_two_growth(a: f64) -> GrowthSpec {
    GrowthSpec {
        f1_x: 0.25,
        f1_y: a.abs(),
        f1_const: 1.0,
        f2_x: a.abs(),
        f2_y: 0.25,
        f2_const: 1.0,
        alpha_x: 0.125,
        alpha_y: 0.125,
        alpha_const: 0.0,
        beta_x: 0.125,
        beta_y: 0.125,
        beta_const: 0.0,
    }
}
