//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Polynomial`] keeps its terms in strictly decreasing graded-lexicographic
//! order of their exponent vectors, with no zero coefficients. Two polynomials
//! are equal as functions over the reals iff they are structurally equal, which
//! is what the lumping checks rely on.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::drift::DriftExpr;
use super::rational::{format_rational, to_f64, Rational};

/// Exponent vector of a monomial: `(variable, exponent)` pairs sorted by
/// variable, exponents strictly positive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<(usize, u32)>);

impl Exponents {
    pub fn one() -> Self {
        Exponents(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        Exponents(vec![(index, 1)])
    }

    /// Builds an exponent vector from arbitrary pairs, merging repeated
    /// variables and dropping zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(usize, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        v.dedup_by(|next, prev| {
            if next.0 == prev.0 {
                prev.1 += next.1;
                true
            } else {
                false
            }
        });
        Exponents(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0.binary_search_by_key(&var, |&(i, _)| i).map(|k| self.0[k].1).unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(i, _)| i)
    }

    pub fn mul(&self, other: &Exponents) -> Exponents {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Exponents(out)
    }

    /// Exponent vector with `var`'s exponent lowered by one; `None` if `var`
    /// does not occur.
    fn lower(&self, var: usize) -> Option<(u32, Exponents)> {
        let k = self.0.binary_search_by_key(&var, |&(i, _)| i).ok()?;
        let e = self.0[k].1;
        let mut v = self.0.clone();
        if e == 1 {
            v.remove(k);
        } else {
            v[k].1 -= 1;
        }
        Some((e, Exponents(v)))
    }

    fn rename(&self, f: &impl Fn(usize) -> usize) -> Exponents {
        Exponents::from_pairs(self.0.iter().map(|&(i, e)| (f(i), e)))
    }
}

impl Ord for Exponents {
    /// Graded lexicographic order with `x0 > x1 > ...`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (&(i, a), &(j, b)) in self.0.iter().zip(other.0.iter()) {
                if i != j {
                    // the side holding the smaller variable index is larger
                    return j.cmp(&i);
                }
                if a != b {
                    return a.cmp(&b);
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coefficient: Rational,
    pub exponents: Exponents,
}

impl Monomial {
    pub fn new(coefficient: Rational, exponents: Exponents) -> Self {
        Monomial { coefficient, exponents }
    }

    pub fn constant(coefficient: Rational) -> Self {
        Monomial::new(coefficient, Exponents::one())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(value: Rational) -> Self {
        Polynomial::from_terms(vec![Monomial::constant(value)])
    }

    pub fn var(index: usize) -> Self {
        Polynomial { terms: vec![Monomial::new(Rational::one(), Exponents::var(index))] }
    }

    /// Canonical form of an arbitrary term list: like terms merged, zero
    /// coefficients dropped, terms sorted. Idempotent.
    pub fn from_terms(mut terms: Vec<Monomial>) -> Self {
        terms.sort_by(|a, b| b.exponents.cmp(&a.exponents));
        let mut out: Vec<Monomial> = Vec::with_capacity(terms.len());
        for term in terms {
            match out.last_mut() {
                Some(last) if last.exponents == term.exponents => {
                    last.coefficient += term.coefficient;
                }
                _ => {
                    if out.last().is_some_and(|l| l.coefficient.is_zero()) {
                        out.pop();
                    }
                    out.push(term);
                }
            }
        }
        if out.last().is_some_and(|l| l.coefficient.is_zero()) {
            out.pop();
        }
        Polynomial { terms: out }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Monomial> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [t] if t.exponents.is_one() => Some(t.coefficient.clone()),
            _ => None,
        }
    }

    /// Total degree; zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.first().map(|t| t.exponents.degree()).unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.iter().flat_map(|t| t.exponents.iter().map(|(i, _)| i)).collect()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.exponents.max_var()).max()
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|t| Monomial::new(&t.coefficient * factor, t.exponents.clone())).collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut acc = Polynomial::constant(Rational::one());
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }

    /// Simultaneous substitution. Variables missing from `sigma` are kept.
    pub fn substitute(&self, sigma: &HashMap<usize, Polynomial>) -> Polynomial {
        let mut acc: Vec<Monomial> = Vec::new();
        for term in &self.terms {
            let mut product = Polynomial::constant(term.coefficient.clone());
            let mut kept = Vec::new();
            for (var, e) in term.exponents.iter() {
                match sigma.get(&var) {
                    Some(image) => product = &product * &image.pow(e),
                    None => kept.push((var, e)),
                }
            }
            let kept = Exponents::from_pairs(kept);
            acc.extend(product.terms.into_iter().map(|m| Monomial::new(m.coefficient, m.exponents.mul(&kept))));
        }
        Polynomial::from_terms(acc)
    }

    /// Substitution of variables by variables, `x_i -> x_{f(i)}`.
    pub fn rename(&self, f: impl Fn(usize) -> usize) -> Polynomial {
        Polynomial::from_terms(
            self.terms.iter().map(|t| Monomial::new(t.coefficient.clone(), t.exponents.rename(&f))).collect(),
        )
    }

    /// Formal partial derivative with respect to `var`.
    pub fn partial(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let (e, lowered) = t.exponents.lower(var)?;
                Some(Monomial::new(&t.coefficient * Rational::from_integer(e.into()), lowered))
            })
            .collect();
        Polynomial::from_terms(terms)
    }

    /// All nonzero partial derivatives at once, keyed by variable. One pass
    /// over the terms.
    pub fn gradient(&self) -> HashMap<usize, Polynomial> {
        let mut parts: HashMap<usize, Vec<Monomial>> = HashMap::new();
        for t in &self.terms {
            for (var, _) in t.exponents.iter() {
                let (e, lowered) = t.exponents.lower(var).expect("variable occurs");
                parts
                    .entry(var)
                    .or_default()
                    .push(Monomial::new(&t.coefficient * Rational::from_integer(e.into()), lowered));
            }
        }
        parts.into_iter().map(|(v, terms)| (v, Polynomial::from_terms(terms))).collect()
    }

    /// Exact evaluation. Variables beyond `values` are a caller bug.
    pub fn eval(&self, values: &[Rational]) -> Rational {
        let mut sum = Rational::zero();
        for t in &self.terms {
            let mut prod = t.coefficient.clone();
            for (var, e) in t.exponents.iter() {
                for _ in 0..e {
                    prod *= &values[var];
                }
            }
            sum += prod;
        }
        sum
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.exponents.iter().fold(to_f64(&t.coefficient), |acc, (var, e)| acc * values[var].powi(e as i32)))
            .sum()
    }

    pub fn to_expr(&self) -> DriftExpr {
        let mut out: Option<DriftExpr> = None;
        for t in &self.terms {
            let mut factors: Vec<DriftExpr> = Vec::new();
            let coeff = t.coefficient.abs();
            if !coeff.is_one() || t.exponents.is_one() {
                factors.push(DriftExpr::Const(coeff));
            }
            for (var, e) in t.exponents.iter() {
                factors.extend(std::iter::repeat_n(DriftExpr::Var(var), e as usize));
            }
            let product = factors
                .into_iter()
                .reduce(|a, b| DriftExpr::Mul(Box::new(a), Box::new(b)))
                .expect("at least one factor");
            let negative = t.coefficient.is_negative();
            out = Some(match out {
                None if negative => DriftExpr::Mul(Box::new(DriftExpr::Const(-Rational::one())), Box::new(product)),
                None => product,
                Some(acc) if negative => DriftExpr::Sub(Box::new(acc), Box::new(product)),
                Some(acc) => DriftExpr::Add(Box::new(acc), Box::new(product)),
            });
        }
        out.unwrap_or_else(|| DriftExpr::Const(Rational::zero()))
    }

    /// Renders the polynomial in the model grammar, e.g. `5*x1 - x2 - x3`.
    /// Powers are written as repeated products.
    pub fn display<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let negative = t.coefficient.is_negative();
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let coeff = t.coefficient.abs();
            let mut factors: Vec<String> = Vec::new();
            if !coeff.is_one() || t.exponents.is_one() {
                let text = format_rational(&coeff);
                if coeff.is_integer() || !text.contains('/') {
                    factors.push(text);
                } else {
                    factors.push(format!("({text})"));
                }
            }
            for (var, e) in t.exponents.iter() {
                for _ in 0..e {
                    factors.push(names[var].as_ref().to_string());
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, other: &Polynomial) -> Polynomial {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].exponents.cmp(&b[j].exponents) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].coefficient + &b[j].coefficient;
                    if !c.is_zero() {
                        out.push(Monomial::new(c, a[i].exponents.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { terms: out }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, other: Polynomial) -> Polynomial {
        &self + &other
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|t| Monomial::new(-&t.coefficient, t.exponents.clone())).collect() }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, other: &Polynomial) -> Polynomial {
        self + &(-other)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, other: Polynomial) -> Polynomial {
        &self - &other
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Monomial::new(&a.coefficient * &b.coefficient, a.exponents.mul(&b.exponents)));
            }
        }
        Polynomial::from_terms(terms)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, other: Polynomial) -> Polynomial {
        &self * &other
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        let terms: Vec<Monomial> = iter.flat_map(|p| p.terms).collect();
        Polynomial::from_terms(terms)
    }
}
