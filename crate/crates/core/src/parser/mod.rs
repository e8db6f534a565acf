//! The `.ode` model language.
//!
//! ```text
//! begin model
//!   begin init  x1 = 1  x2 = 0.5  end init
//!   begin ode   d(x1) = -x1  d(x2) = 2*x1 - x2  end ode
//!   begin partition {x1}, {x2} end partition
//!   begin observe x2 end observe
//! end model
//! ```
//!
//! A `begin reactions ... end reactions` section (`a + 2*b -> c, 0.5`) may
//! replace the ODE section. Numbers are read exactly; besides decimals, init
//! values and rates may be written as fractions `p/q`.

mod lexer;
mod serialize;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::encode::{rn_to_ode, Multiset, Reaction, ReactionNetwork};
use crate::ir::drift::negate;
use crate::ir::rational::parse_rational;
use crate::ir::{DriftExpr, Drifts, Exponents, OdeSystem, Partition, Rational};
use lexer::{tokenize, Tok, Token};

pub use serialize::{serialize_model, Form, SerializeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: expected {expected}, found {found}")]
    Syntax { line: usize, column: usize, expected: String, found: String },
    #[error("{line}:{column}: undeclared variable `{name}`")]
    UndeclaredVariable { name: String, line: usize, column: usize },
    #[error("{line}:{column}: `{name}` is declared twice")]
    DuplicateVariable { name: String, line: usize, column: usize },
    #[error("{line}:{column}: partition does not partition the variables: {detail}")]
    PartitionCoverage { line: usize, column: usize, detail: String },
    #[error("{line}:{column}: {message}")]
    Invalid { line: usize, column: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> Span {
        let (line, column) = match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UndeclaredVariable { line, column, .. }
            | ParseError::DuplicateVariable { line, column, .. }
            | ParseError::PartitionCoverage { line, column, .. }
            | ParseError::Invalid { line, column, .. } => (*line, *column),
        };
        Span { line, column }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSystem {
    Ode(OdeSystem),
    Reactions(ReactionNetwork),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDocument {
    pub system: ModelSystem,
    pub partition: Option<Partition>,
    /// Declaration site of every variable.
    pub spans: BTreeMap<String, Span>,
}

impl ModelDocument {
    pub fn from_ode(system: OdeSystem, partition: Option<Partition>) -> Self {
        ModelDocument { system: ModelSystem::Ode(system), partition, spans: BTreeMap::new() }
    }

    /// The ODE view of the document; reaction networks are read with
    /// mass-action kinetics.
    pub fn ode(&self) -> OdeSystem {
        match &self.system {
            ModelSystem::Ode(s) => s.clone(),
            ModelSystem::Reactions(rn) => rn_to_ode(rn),
        }
    }

    pub fn names(&self) -> &[String] {
        match &self.system {
            ModelSystem::Ode(s) => s.names(),
            ModelSystem::Reactions(rn) => rn.species(),
        }
    }
}

pub fn parse_model(text: &str) -> Result<ModelDocument, ParseError> {
    let tokens = tokenize(text)?;
    Parser { tokens, pos: 0, index: HashMap::new() }.model()
}

/// A bare block list such as `{x1}, {x2, x3}` over `names`.
pub fn parse_partition<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Partition, ParseError> {
    let tokens = tokenize(text)?;
    let index = names.iter().enumerate().map(|(i, n)| (n.as_ref().to_string(), i)).collect();
    let mut parser = Parser { tokens, pos: 0, index };
    let partition = parser.blocks(names.len())?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error("end of partition"));
    }
    Ok(partition)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    index: HashMap<String, usize>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        &self.tokens[(self.pos + ahead).min(self.tokens.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let Span { line, column } = self.span();
        ParseError::Syntax { line, column, expected: expected.into(), found: self.peek().describe() }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == w)
    }

    fn expect_sym(&mut self, s: &'static str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("`{s}`")))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("`{w}`")))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if name != "begin" && name != "end" => {
                let span = self.span();
                self.bump();
                Ok((name, span))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn section_start(&mut self, name: &str) -> Result<(), ParseError> {
        self.expect_word("begin")?;
        self.expect_word(name)
    }

    fn at_section(&self, name: &str) -> bool {
        self.is_word("begin") && matches!(self.peek_at(1), Tok::Ident(t) if t == name)
    }

    fn at_end(&self, name: &str) -> bool {
        self.is_word("end") && matches!(self.peek_at(1), Tok::Ident(t) if t == name)
    }

    fn section_end(&mut self, name: &str) -> Result<(), ParseError> {
        self.expect_word("end")?;
        self.expect_word(name)
    }

    fn resolve(&self, name: &str, span: Span) -> Result<usize, ParseError> {
        self.index.get(name).copied().ok_or_else(|| ParseError::UndeclaredVariable {
            name: name.to_string(),
            line: span.line,
            column: span.column,
        })
    }

    fn model(mut self) -> Result<ModelDocument, ParseError> {
        self.section_start("model")?;
        let (names, init, spans) = self.init()?;
        let system_span = self.span();
        let body = if self.at_section("ode") {
            Body::Ode(self.odes(names.len())?)
        } else if self.at_section("reactions") {
            Body::Reactions(self.reactions()?)
        } else {
            return Err(self.error("`begin ode` or `begin reactions`"));
        };
        let partition = if self.at_section("partition") { Some(self.partition(names.len())?) } else { None };
        let observables = if self.at_section("observe") { self.observe()? } else { BTreeSet::new() };
        self.section_end("model")?;
        if !matches!(self.peek(), Tok::Eof) {
            return Err(self.error("end of input"));
        }
        let invalid =
            |message: String| ParseError::Invalid { line: system_span.line, column: system_span.column, message };
        let system = match body {
            Body::Ode(exprs) => {
                let drifts = Drifts::Expr(exprs).normalized();
                let s = OdeSystem::new(names, drifts, init, observables).map_err(|e| invalid(e.to_string()))?;
                ModelSystem::Ode(s)
            }
            Body::Reactions(reactions) => {
                let rn = ReactionNetwork::new(names, reactions, init)
                    .and_then(|rn| rn.with_observables(observables))
                    .map_err(|e| invalid(e.to_string()))?;
                ModelSystem::Reactions(rn)
            }
        };
        Ok(ModelDocument { system, partition, spans })
    }

    #[allow(clippy::type_complexity)]
    fn init(&mut self) -> Result<(Vec<String>, Vec<Rational>, BTreeMap<String, Span>), ParseError> {
        self.section_start("init")?;
        let mut names = Vec::new();
        let mut init = Vec::new();
        let mut spans = BTreeMap::new();
        while !self.at_end("init") {
            let (name, span) = self.ident()?;
            if self.index.contains_key(&name) {
                return Err(ParseError::DuplicateVariable { name, line: span.line, column: span.column });
            }
            self.expect_sym("=")?;
            let value = self.literal()?;
            self.index.insert(name.clone(), names.len());
            spans.insert(name.clone(), span);
            names.push(name);
            init.push(value);
        }
        if names.is_empty() {
            return Err(self.error("at least one variable declaration"));
        }
        self.section_end("init")?;
        Ok((names, init, spans))
    }

    /// Signed decimal, or a fraction `p/q`.
    fn literal(&mut self) -> Result<Rational, ParseError> {
        let mut negative = false;
        while self.is_sym("-") || self.is_sym("+") {
            negative ^= self.is_sym("-");
            self.bump();
        }
        let value = self.unsigned_literal()?;
        Ok(if negative { -value } else { value })
    }

    fn unsigned_literal(&mut self) -> Result<Rational, ParseError> {
        let Tok::Number(text) = self.peek().clone() else {
            return Err(self.error("a number"));
        };
        let span = self.span();
        self.bump();
        let mut value = parse_rational(&text).ok_or(ParseError::Syntax {
            line: span.line,
            column: span.column,
            expected: "a number".into(),
            found: format!("`{text}`"),
        })?;
        if self.is_sym("/") && matches!(self.peek_at(1), Tok::Number(_)) {
            self.bump();
            let den_span = self.span();
            let Tok::Number(den) = self.bump().tok else { unreachable!() };
            let den = parse_rational(&den).filter(|d| !d.is_zero()).ok_or(ParseError::Invalid {
                line: den_span.line,
                column: den_span.column,
                message: format!("invalid denominator `{den}`"),
            })?;
            value /= den;
        }
        Ok(value)
    }

    fn odes(&mut self, n: usize) -> Result<Vec<DriftExpr>, ParseError> {
        self.section_start("ode")?;
        let mut drifts: Vec<Option<DriftExpr>> = vec![None; n];
        while !self.at_end("ode") {
            self.expect_word("d")?;
            self.expect_sym("(")?;
            let (name, span) = self.ident()?;
            let i = self.resolve(&name, span)?;
            self.expect_sym(")")?;
            self.expect_sym("=")?;
            let e = self.expr()?;
            if drifts[i].is_some() {
                return Err(ParseError::DuplicateVariable { name, line: span.line, column: span.column });
            }
            drifts[i] = Some(e);
        }
        self.section_end("ode")?;
        // variables without an equation are constant
        Ok(drifts.into_iter().map(|d| d.unwrap_or(DriftExpr::Const(Rational::zero()))).collect())
    }

    fn expr(&mut self) -> Result<DriftExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.is_sym("+") {
                self.bump();
                acc = DriftExpr::add(acc, self.term()?);
            } else if self.is_sym("-") {
                self.bump();
                acc = DriftExpr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<DriftExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.is_sym("*") {
                self.bump();
                acc = DriftExpr::mul(acc, self.unary()?);
            } else if self.is_sym("/") {
                self.bump();
                let den = self.unary()?;
                acc = match (acc, den) {
                    (DriftExpr::Const(a), DriftExpr::Const(b)) if !b.is_zero() => DriftExpr::Const(a / b),
                    (a, b) => DriftExpr::div(a, b),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<DriftExpr, ParseError> {
        if self.is_sym("-") {
            self.bump();
            return Ok(negate(self.unary()?));
        }
        if self.is_sym("+") {
            self.bump();
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<DriftExpr, ParseError> {
        match self.peek().clone() {
            Tok::Number(_) => {
                let Tok::Number(text) = self.bump().tok else { unreachable!() };
                let span = self.tokens[self.pos - 1].span;
                parse_rational(&text).map(DriftExpr::Const).ok_or(ParseError::Syntax {
                    line: span.line,
                    column: span.column,
                    expected: "a number".into(),
                    found: format!("`{text}`"),
                })
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name)
                if matches!(name.as_str(), "min" | "max" | "abs") && matches!(self.peek_at(1), Tok::Sym("(")) =>
            {
                self.bump();
                self.bump();
                let a = self.expr()?;
                let e = if name == "abs" {
                    DriftExpr::abs(a)
                } else {
                    self.expect_sym(",")?;
                    let b = self.expr()?;
                    if name == "min" {
                        DriftExpr::min(a, b)
                    } else {
                        DriftExpr::max(a, b)
                    }
                };
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(_) => {
                let (name, span) = self.ident()?;
                Ok(DriftExpr::Var(self.resolve(&name, span)?))
            }
            _ => Err(self.error("an expression")),
        }
    }

    fn reactions(&mut self) -> Result<Vec<Reaction>, ParseError> {
        self.section_start("reactions")?;
        let mut out = Vec::new();
        while !self.at_end("reactions") {
            let reagents = self.multiset()?;
            self.expect_sym("->")?;
            let products = self.multiset()?;
            self.expect_sym(",")?;
            let span = self.span();
            let rate = self.literal()?;
            if rate.is_zero() {
                return Err(ParseError::Invalid {
                    line: span.line,
                    column: span.column,
                    message: "reaction rate must be nonzero".into(),
                });
            }
            out.push(Reaction { reagents, products, rate });
        }
        self.section_end("reactions")?;
        Ok(out)
    }

    fn multiset(&mut self) -> Result<Multiset, ParseError> {
        if matches!(self.peek(), Tok::Number(t) if t == "0") {
            self.bump();
            return Ok(Exponents::one());
        }
        let mut pairs = Vec::new();
        loop {
            let mut k = 1u32;
            if let Tok::Number(text) = self.peek().clone() {
                k = text
                    .parse()
                    .ok()
                    .filter(|&k| k > 0)
                    .ok_or_else(|| self.error("a positive integer multiplicity"))?;
                self.bump();
                self.expect_sym("*")?;
            }
            let (name, span) = self.ident()?;
            pairs.push((self.resolve(&name, span)?, k));
            if self.is_sym("+") {
                self.bump();
            } else {
                return Ok(Exponents::from_pairs(pairs));
            }
        }
    }

    fn partition(&mut self, n: usize) -> Result<Partition, ParseError> {
        self.section_start("partition")?;
        let partition = self.blocks(n)?;
        self.section_end("partition")?;
        Ok(partition)
    }

    fn blocks(&mut self, n: usize) -> Result<Partition, ParseError> {
        let start = self.span();
        let mut blocks = Vec::new();
        loop {
            self.expect_sym("{")?;
            let mut block = Vec::new();
            loop {
                let (name, span) = self.ident()?;
                block.push(self.resolve(&name, span)?);
                if self.is_sym(",") {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect_sym("}")?;
            blocks.push(block);
            if self.is_sym(",") {
                self.bump();
            } else {
                break;
            }
        }
        Partition::new(n, blocks).map_err(|e| ParseError::PartitionCoverage {
            line: start.line,
            column: start.column,
            detail: e.to_string(),
        })
    }

    fn observe(&mut self) -> Result<BTreeSet<usize>, ParseError> {
        self.section_start("observe")?;
        let mut out = BTreeSet::new();
        loop {
            let (name, span) = self.ident()?;
            out.insert(self.resolve(&name, span)?);
            if self.is_sym(",") {
                self.bump();
            } else {
                break;
            }
        }
        self.section_end("observe")?;
        Ok(out)
    }
}

enum Body {
    Ode(Vec<DriftExpr>),
    Reactions(Vec<Reaction>),
}
