//! Reaction networks and their translation to and from polynomial ODEs.
//!
//! Reactions carry a rational rate that may be negative, so every polynomial
//! ODE system has an encoding: each monomial `c * x^r` in the drift of `s`
//! becomes the reaction `r -> r + s` with rate `c`.

use std::collections::{BTreeSet, HashSet};

use num_traits::Zero;
use thiserror::Error;

use crate::ir::{Exponents, Monomial, OdeSystem, Polynomial, Rational, SystemError};

/// Multiset of species as sorted `(species, multiplicity)` pairs.
pub type Multiset = Exponents;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub reagents: Multiset,
    pub products: Multiset,
    pub rate: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("drift of `{0}` is not polynomial")]
    NonPolynomialDrift(String),
    #[error("reaction {0} has rate zero")]
    ZeroRate(usize),
    #[error("reaction {reaction} references species {species} outside the network")]
    SpeciesOutOfRange { reaction: usize, species: usize },
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    init: Vec<Rational>,
    observables: BTreeSet<usize>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>, init: Vec<Rational>) -> Result<Self, EncodeError> {
        let n = species.len();
        if init.len() != n {
            return Err(
                SystemError::LengthMismatch { what: "initial conditions", expected: n, found: init.len() }.into()
            );
        }
        let mut seen = HashSet::new();
        for s in &species {
            if !seen.insert(s.as_str()) {
                return Err(SystemError::DuplicateName(s.clone()).into());
            }
        }
        for (k, r) in reactions.iter().enumerate() {
            if r.rate.is_zero() {
                return Err(EncodeError::ZeroRate(k));
            }
            if let Some(species) = [r.reagents.max_var(), r.products.max_var()].into_iter().flatten().find(|&s| s >= n)
            {
                return Err(EncodeError::SpeciesOutOfRange { reaction: k, species });
            }
        }
        Ok(ReactionNetwork { species, reactions, init, observables: BTreeSet::new() })
    }

    pub fn with_observables(mut self, observables: BTreeSet<usize>) -> Result<Self, EncodeError> {
        if let Some(&o) = observables.iter().find(|&&o| o >= self.species.len()) {
            return Err(SystemError::ObservableOutOfRange(o).into());
        }
        self.observables = observables;
        Ok(self)
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn init(&self) -> &[Rational] {
        &self.init
    }

    pub fn observables(&self) -> &BTreeSet<usize> {
        &self.observables
    }
}

/// Mass-action semantics: species `s` receives
/// `rate * (products(s) - reagents(s)) * prod_t x_t^reagents(t)` from each reaction.
pub fn rn_to_ode(rn: &ReactionNetwork) -> OdeSystem {
    let n = rn.species.len();
    let mut terms: Vec<Vec<Monomial>> = vec![Vec::new(); n];
    for r in &rn.reactions {
        let touched: BTreeSet<usize> = r.reagents.iter().chain(r.products.iter()).map(|(s, _)| s).collect();
        for s in touched {
            let net = i64::from(r.products.get(s)) - i64::from(r.reagents.get(s));
            if net != 0 {
                let coefficient = &r.rate * Rational::from_integer(net.into());
                terms[s].push(Monomial::new(coefficient, r.reagents.clone()));
            }
        }
    }
    let drifts = terms.into_iter().map(Polynomial::from_terms).collect();
    OdeSystem::polynomial(rn.species.clone(), drifts, rn.init.clone())
        .and_then(|s| s.with_observables(rn.observables.clone()))
        .expect("network invariants carry over to the system")
}

/// One reaction per monomial, ordered by species then by monomial order.
pub fn ode_to_rn(ode: &OdeSystem) -> Result<ReactionNetwork, EncodeError> {
    let drifts = ode.polynomial_drifts().ok_or_else(|| {
        let expr = ode.expr_drifts();
        let k = expr.iter().position(|e| !e.is_polynomial()).unwrap_or(0);
        EncodeError::NonPolynomialDrift(ode.names()[k].clone())
    })?;
    let mut reactions = Vec::new();
    for (s, drift) in drifts.iter().enumerate() {
        for term in drift.terms() {
            reactions.push(Reaction {
                reagents: term.exponents.clone(),
                products: term.exponents.mul(&Exponents::var(s)),
                rate: term.coefficient.clone(),
            });
        }
    }
    ReactionNetwork::new(ode.names().to_vec(), reactions, ode.init().to_vec())?
        .with_observables(ode.observables().clone())
}

impl Reaction {
    /// `a + 2*b -> c, rate` in the model grammar.
    pub fn display<S: AsRef<str>>(&self, names: &[S]) -> String {
        format!(
            "{} -> {}, {}",
            display_multiset(&self.reagents, names),
            display_multiset(&self.products, names),
            crate::ir::rational::format_rational(&self.rate)
        )
    }
}

pub fn display_multiset<S: AsRef<str>>(m: &Multiset, names: &[S]) -> String {
    if m.is_one() {
        return "0".to_string();
    }
    m.iter()
        .map(|(s, k)| if k == 1 { names[s].as_ref().to_string() } else { format!("{k}*{}", names[s].as_ref()) })
        .collect::<Vec<_>>()
        .join(" + ")
}
