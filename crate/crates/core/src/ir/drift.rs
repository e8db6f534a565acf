//! Drift expressions beyond polynomials: rational functions, min/max, abs.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::poly::Polynomial;
use super::rational::{format_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DriftExpr {
    Const(Rational),
    Var(usize),
    Add(Box<DriftExpr>, Box<DriftExpr>),
    Sub(Box<DriftExpr>, Box<DriftExpr>),
    Mul(Box<DriftExpr>, Box<DriftExpr>),
    Div(Box<DriftExpr>, Box<DriftExpr>),
    Min(Box<DriftExpr>, Box<DriftExpr>),
    Max(Box<DriftExpr>, Box<DriftExpr>),
    Abs(Box<DriftExpr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    /// The denominator subexpression evaluated to zero.
    #[error("division by zero in denominator {0:?}")]
    DivisionByZero(DriftExpr),
}

#[allow(clippy::should_implement_trait)]
impl DriftExpr {
    pub fn constant(value: Rational) -> Self {
        DriftExpr::Const(value)
    }

    pub fn add(a: DriftExpr, b: DriftExpr) -> Self {
        DriftExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: DriftExpr, b: DriftExpr) -> Self {
        DriftExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: DriftExpr, b: DriftExpr) -> Self {
        DriftExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: DriftExpr, b: DriftExpr) -> Self {
        DriftExpr::Div(Box::new(a), Box::new(b))
    }

    pub fn min(a: DriftExpr, b: DriftExpr) -> Self {
        DriftExpr::Min(Box::new(a), Box::new(b))
    }

    pub fn max(a: DriftExpr, b: DriftExpr) -> Self {
        DriftExpr::Max(Box::new(a), Box::new(b))
    }

    pub fn abs(a: DriftExpr) -> Self {
        DriftExpr::Abs(Box::new(a))
    }

    /// Sum of a sequence of expressions; `0` when empty.
    pub fn sum(items: impl IntoIterator<Item = DriftExpr>) -> DriftExpr {
        items.into_iter().reduce(DriftExpr::add).unwrap_or_else(|| DriftExpr::Const(Rational::zero()))
    }

    pub fn eval(&self, values: &[Rational]) -> Result<Rational, EvalError> {
        use DriftExpr::*;
        Ok(match self {
            Const(c) => c.clone(),
            Var(i) => values[*i].clone(),
            Add(a, b) => a.eval(values)? + b.eval(values)?,
            Sub(a, b) => a.eval(values)? - b.eval(values)?,
            Mul(a, b) => a.eval(values)? * b.eval(values)?,
            Div(a, b) => {
                let num = a.eval(values)?;
                let den = b.eval(values)?;
                if den.is_zero() {
                    return Err(EvalError::DivisionByZero((**b).clone()));
                }
                num / den
            }
            Min(a, b) => std::cmp::min(a.eval(values)?, b.eval(values)?),
            Max(a, b) => std::cmp::max(a.eval(values)?, b.eval(values)?),
            Abs(a) => a.eval(values)?.abs(),
        })
    }

    pub fn eval_f64(&self, values: &[f64]) -> Result<f64, EvalError> {
        use DriftExpr::*;
        Ok(match self {
            Const(c) => to_f64(c),
            Var(i) => values[*i],
            Add(a, b) => a.eval_f64(values)? + b.eval_f64(values)?,
            Sub(a, b) => a.eval_f64(values)? - b.eval_f64(values)?,
            Mul(a, b) => a.eval_f64(values)? * b.eval_f64(values)?,
            Div(a, b) => {
                let num = a.eval_f64(values)?;
                let den = b.eval_f64(values)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero((**b).clone()));
                }
                num / den
            }
            Min(a, b) => a.eval_f64(values)?.min(b.eval_f64(values)?),
            Max(a, b) => a.eval_f64(values)?.max(b.eval_f64(values)?),
            Abs(a) => a.eval_f64(values)?.abs(),
        })
    }

    /// Polynomial form when the expression uses only `+ - *` and division by
    /// nonzero constant subexpressions.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        use DriftExpr::*;
        Some(match self {
            Const(c) => Polynomial::constant(c.clone()),
            Var(i) => Polynomial::var(*i),
            Add(a, b) => a.to_polynomial()? + b.to_polynomial()?,
            Sub(a, b) => a.to_polynomial()? - b.to_polynomial()?,
            Mul(a, b) => a.to_polynomial()? * b.to_polynomial()?,
            Div(a, b) => {
                let den = b.to_polynomial()?.as_constant()?;
                if den.is_zero() {
                    return None;
                }
                a.to_polynomial()?.scale(&den.recip())
            }
            Min(..) | Max(..) | Abs(..) => return None,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.to_polynomial().is_some()
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let DriftExpr::Var(i) = e {
                out.insert(*i);
            }
        });
        out
    }

    pub fn max_var(&self) -> Option<usize> {
        self.variables().last().copied()
    }

    /// Every denominator subexpression, outermost first, without duplicates.
    pub fn denominators(&self) -> Vec<DriftExpr> {
        let mut out: Vec<DriftExpr> = Vec::new();
        self.visit(&mut |e| {
            if let DriftExpr::Div(_, d) = e {
                if !out.contains(d) {
                    out.push((**d).clone());
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&DriftExpr)) {
        use DriftExpr::*;
        f(self);
        match self {
            Const(_) | Var(_) => {}
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Min(a, b) | Max(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Abs(a) => a.visit(f),
        }
    }

    /// Replaces every variable `x_i` by `f(i)`.
    pub fn substitute(&self, f: &impl Fn(usize) -> DriftExpr) -> DriftExpr {
        use DriftExpr::*;
        let bin = |a: &DriftExpr, b: &DriftExpr| (Box::new(a.substitute(f)), Box::new(b.substitute(f)));
        match self {
            Const(c) => Const(c.clone()),
            Var(i) => f(*i),
            Add(a, b) => {
                let (a, b) = bin(a, b);
                Add(a, b)
            }
            Sub(a, b) => {
                let (a, b) = bin(a, b);
                Sub(a, b)
            }
            Mul(a, b) => {
                let (a, b) = bin(a, b);
                Mul(a, b)
            }
            Div(a, b) => {
                let (a, b) = bin(a, b);
                Div(a, b)
            }
            Min(a, b) => {
                let (a, b) = bin(a, b);
                Min(a, b)
            }
            Max(a, b) => {
                let (a, b) = bin(a, b);
                Max(a, b)
            }
            Abs(a) => Abs(Box::new(a.substitute(f))),
        }
    }

    pub fn rename(&self, f: impl Fn(usize) -> usize) -> DriftExpr {
        self.substitute(&|i| DriftExpr::Var(f(i)))
    }

    /// Renders in the model grammar using `names` for variables.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> impl fmt::Display + 'a {
        Named { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        use DriftExpr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            // constants that need it parenthesize themselves
            _ => 3,
        }
    }
}

struct Named<'a, S> {
    expr: &'a DriftExpr,
    names: &'a [S],
}

impl<S: AsRef<str>> Named<'_, S> {
    fn write(&self, e: &DriftExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DriftExpr::*;
        let child = |c: &DriftExpr, min_prec: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if c.precedence() < min_prec {
                write!(f, "(")?;
                self.write(c, f)?;
                write!(f, ")")
            } else {
                self.write(c, f)
            }
        };
        match e {
            Const(c) => {
                if c.is_negative() || !c.is_integer() {
                    write!(f, "({})", format_rational(c))
                } else {
                    write!(f, "{}", format_rational(c))
                }
            }
            Var(i) => write!(f, "{}", self.names[*i].as_ref()),
            Add(a, b) => {
                child(a, 1, f)?;
                write!(f, " + ")?;
                child(b, 1, f)
            }
            Sub(a, b) => {
                child(a, 1, f)?;
                write!(f, " - ")?;
                child(b, 2, f)
            }
            Mul(a, b) => {
                child(a, 2, f)?;
                write!(f, "*")?;
                child(b, 3, f)
            }
            Div(a, b) => {
                child(a, 2, f)?;
                write!(f, "/")?;
                child(b, 3, f)
            }
            Min(a, b) | Max(a, b) => {
                write!(f, "{}(", if matches!(e, Min(..)) { "min" } else { "max" })?;
                self.write(a, f)?;
                write!(f, ", ")?;
                self.write(b, f)?;
                write!(f, ")")
            }
            Abs(a) => {
                write!(f, "abs(")?;
                self.write(a, f)?;
                write!(f, ")")
            }
        }
    }
}

impl<S: AsRef<str>> fmt::Display for Named<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}

impl From<&Polynomial> for DriftExpr {
    fn from(p: &Polynomial) -> Self {
        p.to_expr()
    }
}

/// `-e`, written as `(-1)*e`.
pub fn negate(e: DriftExpr) -> DriftExpr {
    match e {
        DriftExpr::Const(c) => DriftExpr::Const(-c),
        other => DriftExpr::mul(DriftExpr::Const(-Rational::one()), other),
    }
}
