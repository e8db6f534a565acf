//! SMT-LIB 2 rendering of [`Formula`]s.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use super::formula::Formula;
use crate::ir::{DriftExpr, Rational};

/// Script asserting the negation of `formula`, so `unsat` means the formula
/// is valid. Every denominator `d` occurring in the formula adds `d != 0` to
/// the antecedent.
pub fn smt_emit<S: AsRef<str>>(formula: &Formula, vars: &[S]) -> String {
    let mut out = String::from("(set-logic QF_NRA)\n");
    for v in vars {
        let _ = writeln!(out, "(declare-const {} Real)", symbol(v.as_ref()));
    }
    let guarded = guard(formula);
    let _ = writeln!(out, "(assert (not {}))", formula_sexpr(&guarded, vars));
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

/// `formula` with nonzero-denominator side conditions folded into its
/// antecedent.
pub fn guard(formula: &Formula) -> Formula {
    let mut denominators: Vec<DriftExpr> = Vec::new();
    for t in formula.terms() {
        for d in t.denominators() {
            if !denominators.contains(&d) {
                denominators.push(d);
            }
        }
    }
    if denominators.is_empty() {
        return formula.clone();
    }
    let guards: Vec<Formula> =
        denominators.into_iter().map(|d| Formula::not(Formula::Eq(d, DriftExpr::Const(Rational::zero())))).collect();
    match formula {
        Formula::Implies(a, c) => {
            let mut ante = guards;
            ante.push((**a).clone());
            Formula::implies(Formula::And(ante), (**c).clone())
        }
        other => Formula::implies(Formula::And(guards), other.clone()),
    }
}

fn symbol(name: &str) -> String {
    format!("|{name}|")
}

pub fn formula_sexpr<S: AsRef<str>>(f: &Formula, vars: &[S]) -> String {
    let list = |op: &str, items: &[Formula]| {
        let parts: Vec<String> = items.iter().map(|g| formula_sexpr(g, vars)).collect();
        format!("({op} {})", parts.join(" "))
    };
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Eq(a, b) => format!("(= {} {})", term_sexpr(a, vars), term_sexpr(b, vars)),
        Formula::Le(a, b) => format!("(<= {} {})", term_sexpr(a, vars), term_sexpr(b, vars)),
        Formula::Lt(a, b) => format!("(< {} {})", term_sexpr(a, vars), term_sexpr(b, vars)),
        Formula::Not(g) => format!("(not {})", formula_sexpr(g, vars)),
        Formula::And(gs) => match gs.as_slice() {
            [] => "true".into(),
            [g] => formula_sexpr(g, vars),
            _ => list("and", gs),
        },
        Formula::Or(gs) => match gs.as_slice() {
            [] => "false".into(),
            [g] => formula_sexpr(g, vars),
            _ => list("or", gs),
        },
        Formula::Implies(a, c) => format!("(=> {} {})", formula_sexpr(a, vars), formula_sexpr(c, vars)),
    }
}

pub fn term_sexpr<S: AsRef<str>>(e: &DriftExpr, vars: &[S]) -> String {
    use DriftExpr::*;
    let t = |x: &DriftExpr| term_sexpr(x, vars);
    match e {
        Const(c) => rational_sexpr(c),
        Var(i) => symbol(vars[*i].as_ref()),
        Add(a, b) => format!("(+ {} {})", t(a), t(b)),
        Sub(a, b) => format!("(- {} {})", t(a), t(b)),
        Mul(a, b) => format!("(* {} {})", t(a), t(b)),
        Div(a, b) => format!("(/ {} {})", t(a), t(b)),
        Min(a, b) => {
            let (a, b) = (t(a), t(b));
            format!("(ite (<= {a} {b}) {a} {b})")
        }
        Max(a, b) => {
            let (a, b) = (t(a), t(b));
            format!("(ite (>= {a} {b}) {a} {b})")
        }
        Abs(a) => {
            let a = t(a);
            format!("(ite (>= {a} 0.0) {a} (- {a}))")
        }
    }
}

/// `3.0`, `(- 3.0)`, `(/ 1.0 3.0)`, `(- (/ 1.0 3.0))`.
pub fn rational_sexpr(c: &Rational) -> String {
    let abs = c.abs();
    let body = if abs.is_integer() {
        format!("{}.0", abs.numer())
    } else {
        format!("(/ {}.0 {}.0)", abs.numer(), abs.denom())
    };
    if c.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}
