use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::drift::DriftExpr;
use super::poly::Polynomial;
use super::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected {expected} {what}, found {found}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("drift of `{name}` references variable index {index} outside the system")]
    VariableOutOfRange { name: String, index: usize },
    #[error("observable index {0} outside the system")]
    ObservableOutOfRange(usize),
}

/// One drift per variable, all of the same kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Drifts {
    Polynomial(Vec<Polynomial>),
    Expr(Vec<DriftExpr>),
}

impl Drifts {
    pub fn len(&self) -> usize {
        match self {
            Drifts::Polynomial(v) => v.len(),
            Drifts::Expr(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Collapses expression drifts into polynomials when every drift allows it.
    pub fn normalized(self) -> Drifts {
        match self {
            Drifts::Expr(exprs) => match exprs.iter().map(DriftExpr::to_polynomial).collect::<Option<Vec<_>>>() {
                Some(polys) => Drifts::Polynomial(polys),
                None => Drifts::Expr(exprs),
            },
            poly => poly,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeSystem {
    names: Vec<String>,
    drifts: Drifts,
    init: Vec<Rational>,
    observables: BTreeSet<usize>,
}

impl OdeSystem {
    pub fn new(
        names: Vec<String>,
        drifts: Drifts,
        init: Vec<Rational>,
        observables: BTreeSet<usize>,
    ) -> Result<Self, SystemError> {
        let n = names.len();
        if drifts.len() != n {
            return Err(SystemError::LengthMismatch { what: "drifts", expected: n, found: drifts.len() });
        }
        if init.len() != n {
            return Err(SystemError::LengthMismatch { what: "initial conditions", expected: n, found: init.len() });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(SystemError::DuplicateName(name.clone()));
            }
        }
        let max_vars: Vec<Option<usize>> = match &drifts {
            Drifts::Polynomial(ps) => ps.iter().map(Polynomial::max_var).collect(),
            Drifts::Expr(es) => es.iter().map(DriftExpr::max_var).collect(),
        };
        for (k, m) in max_vars.into_iter().enumerate() {
            if let Some(index) = m.filter(|&m| m >= n) {
                return Err(SystemError::VariableOutOfRange { name: names[k].clone(), index });
            }
        }
        if let Some(&o) = observables.iter().find(|&&o| o >= n) {
            return Err(SystemError::ObservableOutOfRange(o));
        }
        Ok(OdeSystem { names, drifts, init, observables })
    }

    /// Polynomial system with no observables.
    pub fn polynomial(names: Vec<String>, drifts: Vec<Polynomial>, init: Vec<Rational>) -> Result<Self, SystemError> {
        Self::new(names, Drifts::Polynomial(drifts), init, BTreeSet::new())
    }

    /// Names `x1..xn`.
    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn drifts(&self) -> &Drifts {
        &self.drifts
    }

    pub fn init(&self) -> &[Rational] {
        &self.init
    }

    pub fn observables(&self) -> &BTreeSet<usize> {
        &self.observables
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.drifts, Drifts::Polynomial(_))
    }

    pub fn polynomial_drifts(&self) -> Option<&[Polynomial]> {
        match &self.drifts {
            Drifts::Polynomial(p) => Some(p),
            Drifts::Expr(_) => None,
        }
    }

    /// Drifts as expression trees; polynomials are converted.
    pub fn expr_drifts(&self) -> Vec<DriftExpr> {
        match &self.drifts {
            Drifts::Polynomial(p) => p.iter().map(Polynomial::to_expr).collect(),
            Drifts::Expr(e) => e.clone(),
        }
    }

    /// Total number of monomials; `None` for non-polynomial systems.
    pub fn monomial_count(&self) -> Option<usize> {
        self.polynomial_drifts().map(|p| p.iter().map(Polynomial::len).sum())
    }

    pub fn with_init(mut self, init: Vec<Rational>) -> Result<Self, SystemError> {
        if init.len() != self.len() {
            return Err(SystemError::LengthMismatch {
                what: "initial conditions",
                expected: self.len(),
                found: init.len(),
            });
        }
        self.init = init;
        Ok(self)
    }

    pub fn with_observables(mut self, observables: BTreeSet<usize>) -> Result<Self, SystemError> {
        if let Some(&o) = observables.iter().find(|&&o| o >= self.len()) {
            return Err(SystemError::ObservableOutOfRange(o));
        }
        self.observables = observables;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::int;

    #[test]
    fn invariants_enforced() {
        let names = vec!["a".to_string(), "a".to_string()];
        let drifts = Drifts::Polynomial(vec![Polynomial::zero(), Polynomial::zero()]);
        assert_eq!(
            OdeSystem::new(names, drifts, vec![int(0), int(0)], BTreeSet::new()),
            Err(SystemError::DuplicateName("a".into()))
        );
        let r = OdeSystem::polynomial(vec!["a".into()], vec![Polynomial::var(1)], vec![int(0)]);
        assert!(matches!(r, Err(SystemError::VariableOutOfRange { index: 1, .. })));
        let r = OdeSystem::polynomial(vec!["a".into()], vec![], vec![int(0)]);
        assert!(matches!(r, Err(SystemError::LengthMismatch { .. })));
    }

    #[test]
    fn expr_drifts_collapse_to_polynomials() {
        let d = Drifts::Expr(vec![DriftExpr::mul(DriftExpr::Var(0), DriftExpr::Var(0))]).normalized();
        assert_eq!(d, Drifts::Polynomial(vec![Polynomial::var(0).pow(2)]));
        let d = Drifts::Expr(vec![DriftExpr::abs(DriftExpr::Var(0))]).normalized();
        assert!(matches!(d, Drifts::Expr(_)));
    }
}
