//! Exact forward and backward differential equivalences on polynomial
//! systems.
//!
//! A partition `H` is a *backward* equivalence (BDE) when variables in the
//! same block have identical derivatives whenever the state is constant on
//! every block; it is a *forward* equivalence (FDE) when the sum of the
//! derivatives over each block depends on the state only through the block
//! sums. Both conditions are polynomial identities, so they are decided here
//! by exact normalization rather than by sampling.

mod check;
mod oracle;
mod reduce;
mod refine;

use std::fmt;

use thiserror::Error;

use crate::ir::{OdeSystem, Partition, Polynomial, Rational};

pub use check::{check, check_bde, check_fde};
pub use oracle::{brute_force_coarsest, ORACLE_MAX_VARS};
pub use reduce::{
    prepartition_from_inits, reduce, reduce_backward, reduce_forward, reduce_unchecked, shared_observables,
    BackwardReduction, InitMismatch,
};
pub use refine::{coarsest, coarsest_bde, coarsest_fde, refine, Refinement};

/// Which differential equivalence is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum, serde::Serialize)]
pub enum Mode {
    #[value(name = "fde")]
    #[serde(rename = "fde")]
    Forward,
    #[value(name = "bde")]
    #[serde(rename = "bde")]
    Backward,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Forward => "fde",
            Mode::Backward => "bde",
        })
    }
}

/// A failed check: the pair `(first, second)` of block `block` is told apart
/// by the nonzero `witness` polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub block: usize,
    pub pair: (usize, usize),
    /// For forward checks, the block whose derivative sum has unequal
    /// partial derivatives in the pair.
    pub sum_block: Option<usize>,
    pub witness: Polynomial,
    /// A point at which `witness` does not vanish, when one was found.
    pub assignment: Option<Vec<Rational>>,
}

impl Counterexample {
    pub fn describe(&self, system: &OdeSystem) -> String {
        let names = system.names();
        let (i, j) = self.pair;
        let mut out = format!(
            "block {} separates ({}, {}): witness {}",
            self.block,
            names[i],
            names[j],
            self.witness.display(names)
        );
        if let Some(b) = self.sum_block {
            out.push_str(&format!(" (partial derivatives of block {b}'s drift sum differ)"));
        }
        if let Some(v) = &self.assignment {
            let shown: Vec<String> =
                v.iter().zip(names).map(|(x, n)| format!("{n}={}", crate::ir::rational::format_rational(x))).collect();
            out.push_str(&format!(" at [{}]", shown.join(", ")));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Ok,
    Counterexample(Counterexample),
}

impl CheckResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, CheckResult::Ok)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            CheckResult::Ok => None,
            CheckResult::Counterexample(c) => Some(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LumpError {
    #[error("partition covers {found} variables but the system has {expected}")]
    PartitionMismatch { expected: usize, found: usize },
    #[error("the system has non-polynomial drifts")]
    NotPolynomial,
    #[error("partition is not a forward differential equivalence: block {} pair {:?}", .0.block, .0.pair)]
    NotAnFde(Box<Counterexample>),
    #[error("partition is not a backward differential equivalence: block {} pair {:?}", .0.block, .0.pair)]
    NotABde(Box<Counterexample>),
    #[error("brute force limited to {} variables, system has {0}", ORACLE_MAX_VARS)]
    TooLarge(usize),
    #[error("the equivalences refining the seed have no unique coarsest element")]
    NoUniqueCoarsest,
}

fn polynomial_drifts<'a>(system: &'a OdeSystem, partition: &Partition) -> Result<&'a [Polynomial], LumpError> {
    if partition.len() != system.len() {
        return Err(LumpError::PartitionMismatch { expected: system.len(), found: partition.len() });
    }
    system.polynomial_drifts().ok_or(LumpError::NotPolynomial)
}
