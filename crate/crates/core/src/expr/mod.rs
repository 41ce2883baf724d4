//! Expression trees for the right-hand sides `f1`, `f2` (scalar expressions
//! in `t`, `x`, `y`) and for the nonlocal functionals `alpha`, `beta`
//! (expressions over point evaluations, integrals and sup norms of the two
//! solution components). Problems are declarative data: everything a problem
//! file can say about its dynamics goes through this grammar.
//!
//! Grammar (operators in increasing binding strength: `+ -`, `* /`, unary
//! `-`, `^` right associative):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?
//! atom   := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Scalar expressions resolve `t`, `x`, `y` as variables; functional
//! expressions resolve `x(c)` / `y(c)` as point evaluations at a constant
//! abscissa, and `int(x)`, `int(y)`, `supnorm(x)`, `supnorm(y)` as whole-grid
//! atoms. Any other name is a named parameter bound at evaluation time.
//!
//! One deliberate extension beyond plain IEEE evaluation: the exact syntactic
//! patterns `u*sin(v/u)` and `u*cos(v/u)` evaluate to 0 whenever `u`
//! evaluates to 0. The product is bounded by `|u|`, so 0 is the continuous
//! extension; without the rule such right-hand sides would be undefined on a
//! measure-zero set the iteration actually visits.

mod parser;

pub use parser::{parse_functional, parse_scalar, ParseError};

use crate::space::GridFunction;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Named parameter bindings for expression evaluation.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {what}")]
    Domain { what: String },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("grid mismatch between function arguments: {left} vs {right} intervals")]
    GridMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Built-in functions; `Min` and `Max` are binary, the rest unary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Min,
    Max,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Variables available to scalar expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarVar {
    Time,
    X,
    Y,
}

/// Which solution component a functional atom refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    X,
    Y,
}

/// Atoms available to functional expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionalAtom {
    /// `x(c)` or `y(c)`: value at a fixed abscissa in [0,1], linearly
    /// interpolated between grid nodes.
    PointEval(Component, f64),
    /// `int(x)` or `int(y)`: trapezoid integral over the whole grid.
    Integral(Component),
    /// `supnorm(x)` or `supnorm(y)`: max of |values| over the nodes.
    SupNorm(Component),
}

/// Expression tree, generic over the atom alphabet.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<A> {
    Literal(f64),
    Param(String),
    Atom(A),
    Neg(Box<Expr<A>>),
    Binary(BinaryOp, Box<Expr<A>>, Box<Expr<A>>),
    Call(Func, Vec<Expr<A>>),
}

/// Expression in the variables `t`, `x`, `y`.
pub type ScalarExpr = Expr<ScalarVar>;
/// Expression over functional atoms of the two solution components.
pub type FunctionalExpr = Expr<FunctionalAtom>;

impl<A: PartialEq> Expr<A> {
    /// True when `lhs * self` is one of the removable-singularity patterns
    /// `u*sin(v/u)` / `u*cos(v/u)` with `u` structurally identical to `lhs`.
    fn is_vanishing_product_with(&self, lhs: &Expr<A>) -> bool {
        if let Expr::Call(f, args) = self {
            if matches!(f, Func::Sin | Func::Cos) && args.len() == 1 {
                if let Expr::Binary(BinaryOp::Div, _, den) = &args[0] {
                    return den.as_ref() == lhs;
                }
            }
        }
        false
    }

    fn eval_with(
        &self,
        atom: &impl Fn(&A) -> Result<f64, EvalError>,
        params: &Params,
    ) -> Result<f64, EvalError> {
        match self {
            Expr::Literal(v) => Ok(*v),
            Expr::Param(name) => params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundParameter(name.clone())),
            Expr::Atom(a) => atom(a),
            Expr::Neg(e) => Ok(-e.eval_with(atom, params)?),
            Expr::Binary(op, lhs, rhs) => {
                if *op == BinaryOp::Mul && rhs.is_vanishing_product_with(lhs) {
                    // u*sin(v/u), u*cos(v/u): bounded by |u|, so the value
                    // extends continuously to 0 when u vanishes.
                    let u = lhs.eval_with(atom, params)?;
                    if u == 0.0 {
                        return Ok(0.0);
                    }
                    return Ok(u * rhs.eval_with(atom, params)?);
                }
                let l = lhs.eval_with(atom, params)?;
                let r = rhs.eval_with(atom, params)?;
                match op {
                    BinaryOp::Add => Ok(l + r),
                    BinaryOp::Sub => Ok(l - r),
                    BinaryOp::Mul => Ok(l * r),
                    BinaryOp::Div => {
                        if r == 0.0 {
                            Err(EvalError::DivisionByZero)
                        } else {
                            Ok(l / r)
                        }
                    }
                    BinaryOp::Pow => {
                        let v = l.powf(r);
                        if v.is_nan() {
                            Err(EvalError::Domain {
                                what: format!("{l} raised to {r} is undefined"),
                            })
                        } else {
                            Ok(v)
                        }
                    }
                }
            }
            Expr::Call(func, args) => {
                let a0 = args[0].eval_with(atom, params)?;
                match func {
                    Func::Sin => Ok(a0.sin()),
                    Func::Cos => Ok(a0.cos()),
                    Func::Exp => Ok(a0.exp()),
                    Func::Abs => Ok(a0.abs()),
                    Func::Sqrt => {
                        if a0 < 0.0 {
                            Err(EvalError::Domain {
                                what: format!("sqrt of negative number {a0}"),
                            })
                        } else {
                            Ok(a0.sqrt())
                        }
                    }
                    Func::Min => Ok(a0.min(args[1].eval_with(atom, params)?)),
                    Func::Max => Ok(a0.max(args[1].eval_with(atom, params)?)),
                }
            }
        }
    }

    /// Collects every parameter name referenced anywhere in the tree.
    pub fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Literal(_) | Expr::Atom(_) => {}
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(e) => e.collect_params(out),
            Expr::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Expr::Call(_, args) => {
                for a in args {
                    a.collect_params(out);
                }
            }
        }
    }
}

impl Expr<ScalarVar> {
    /// IEEE double evaluation at the point `(t, x, y)`.
    pub fn eval(&self, t: f64, x: f64, y: f64, params: &Params) -> Result<f64, EvalError> {
        self.eval_with(
            &|var| {
                Ok(match var {
                    ScalarVar::Time => t,
                    ScalarVar::X => x,
                    ScalarVar::Y => y,
                })
            },
            params,
        )
    }
}

impl Expr<FunctionalAtom> {
    /// Collects the abscissae of every point-evaluation atom in the tree.
    pub fn point_abscissae(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Atom(FunctionalAtom::PointEval(_, t)) => out.push(*t),
            Expr::Atom(_) | Expr::Literal(_) | Expr::Param(_) => {}
            Expr::Neg(e) => e.point_abscissae(out),
            Expr::Binary(_, l, r) => {
                l.point_abscissae(out);
                r.point_abscissae(out);
            }
            Expr::Call(_, args) => {
                for a in args {
                    a.point_abscissae(out);
                }
            }
        }
    }

    /// Evaluates the functional on a pair of grid functions sharing one grid.
    pub fn eval(
        &self,
        x: &GridFunction,
        y: &GridFunction,
        params: &Params,
    ) -> Result<f64, EvalError> {
        if !x.same_grid(y) {
            return Err(EvalError::GridMismatch {
                left: x.n_intervals(),
                right: y.n_intervals(),
            });
        }
        let component = |c: &Component| match c {
            Component::X => x,
            Component::Y => y,
        };
        self.eval_with(
            &|a| {
                Ok(match a {
                    FunctionalAtom::PointEval(c, t) => component(c).interpolate(*t),
                    FunctionalAtom::Integral(c) => component(c).trapezoid_integral(),
                    FunctionalAtom::SupNorm(c) => component(c).sup_norm(),
                })
            },
            params,
        )
    }
}

// ---------------------------------------------------------------------------
// Printing: precedence-aware, round-trips through the parser.
// ---------------------------------------------------------------------------

/// How atoms of a given alphabet render in the concrete syntax.
pub trait AtomFormat {
    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
}

impl AtomFormat for ScalarVar {
    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarVar::Time => write!(f, "t"),
            ScalarVar::X => write!(f, "x"),
            ScalarVar::Y => write!(f, "y"),
        }
    }
}

impl AtomFormat for FunctionalAtom {
    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comp = |c: &Component| match c {
            Component::X => "x",
            Component::Y => "y",
        };
        match self {
            FunctionalAtom::PointEval(c, t) => write!(f, "{}({:?})", comp(c), t),
            FunctionalAtom::Integral(c) => write!(f, "int({})", comp(c)),
            FunctionalAtom::SupNorm(c) => write!(f, "supnorm({})", comp(c)),
        }
    }
}

impl<A: AtomFormat> Expr<A> {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinaryOp::Pow, ..) => 4,
            Expr::Literal(_) | Expr::Param(_) | Expr::Atom(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let parens = self.precedence() < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Literal(v) => write!(f, "{v:?}")?,
            Expr::Param(name) => write!(f, "{name}")?,
            Expr::Atom(a) => a.fmt_atom(f)?,
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Binary(op, l, r) => {
                let (sym, lp, rp) = match op {
                    BinaryOp::Add => ("+", 1, 2),
                    BinaryOp::Sub => ("-", 1, 2),
                    BinaryOp::Mul => ("*", 2, 3),
                    BinaryOp::Div => ("/", 2, 3),
                    BinaryOp::Pow => ("^", 5, 3),
                };
                l.fmt_prec(f, lp)?;
                write!(f, "{sym}")?;
                r.fmt_prec(f, rp)?;
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl<A: AtomFormat> fmt::Display for Expr<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
