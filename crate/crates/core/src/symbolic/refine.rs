//! Solver-driven partition refinement for arbitrary drift expressions.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use super::formula::{build_pair_fde, build_phi_bde, build_phi_fde, primed_names, Formula};
use super::smt::{guard, smt_emit};
use super::solver::{model_assignment, solver_invoke, SolverCommand, SolverError, Verdict};
use crate::ir::{OdeSystem, Partition, Rational};
use crate::lump::Mode;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("partition covers {found} variables but the system has {expected}")]
    PartitionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("solver could not decide ({reason}); partial partition has {} blocks", .partial.num_blocks())]
    Unknown { reason: String, partial: Partition },
    #[error("solver model does not falsify the query; partial partition has {} blocks", .partial.num_blocks())]
    InvalidWitness { partial: Partition },
    #[error("witness did not split any block; partial partition has {} blocks", .partial.num_blocks())]
    NoProgress { partial: Partition },
}

impl SymbolicError {
    /// Partition reached before the failure, when there was one.
    pub fn partial(&self) -> Option<&Partition> {
        match self {
            SymbolicError::Unknown { partial, .. }
            | SymbolicError::InvalidWitness { partial }
            | SymbolicError::NoProgress { partial } => Some(partial),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolicCheck {
    Valid,
    /// A point falsifying the query; `2n` values in forward mode.
    Witness(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicOutcome {
    pub partition: Partition,
    pub iterations: usize,
    pub solver_calls: usize,
}

struct Session<'a> {
    system: &'a OdeSystem,
    solver: &'a SolverCommand,
    calls: AtomicUsize,
}

impl Session<'_> {
    /// Decides `formula` over `vars`, validating any witness locally.
    fn decide(&self, formula: &Formula, vars: &[String], current: &Partition) -> Result<SymbolicCheck, SymbolicError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        match solver_invoke(&smt_emit(formula, vars), self.solver)? {
            Verdict::Unsat => Ok(SymbolicCheck::Valid),
            Verdict::Unknown(reason) => Err(SymbolicError::Unknown { reason, partial: current.clone() }),
            Verdict::Sat(model) => {
                let point = model_assignment(&model, vars);
                match guard(formula).eval(&point) {
                    Ok(false) => Ok(SymbolicCheck::Witness(point)),
                    _ => Err(SymbolicError::InvalidWitness { partial: current.clone() }),
                }
            }
        }
    }
}

fn validate(system: &OdeSystem, partition: &Partition) -> Result<(), SymbolicError> {
    if partition.len() != system.len() {
        return Err(SymbolicError::PartitionMismatch { expected: system.len(), found: partition.len() });
    }
    Ok(())
}

/// Whether `partition` is a differential equivalence of kind `mode`,
/// decided by the solver.
pub fn symbolic_check(
    system: &OdeSystem,
    partition: &Partition,
    mode: Mode,
    solver: &SolverCommand,
) -> Result<SymbolicCheck, SymbolicError> {
    validate(system, partition)?;
    let session = Session { system, solver, calls: AtomicUsize::new(0) };
    match mode {
        Mode::Backward => session.decide(&build_phi_bde(system, partition), system.names(), partition),
        Mode::Forward => session.decide(&build_phi_fde(system, partition), &primed_names(system.names()), partition),
    }
}

/// Coarsest equivalence of kind `mode` refining `seed`, splitting blocks on
/// solver witnesses until the query is valid.
pub fn symbolic_coarsest(
    system: &OdeSystem,
    seed: &Partition,
    mode: Mode,
    solver: &SolverCommand,
) -> Result<SymbolicOutcome, SymbolicError> {
    validate(system, seed)?;
    let session = Session { system, solver, calls: AtomicUsize::new(0) };
    let mut current = seed.clone();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next = match mode {
            Mode::Backward => bde_step(&session, &current)?,
            Mode::Forward => fde_step(&session, &current)?,
        };
        match next {
            None => {
                return Ok(SymbolicOutcome {
                    partition: current,
                    iterations,
                    solver_calls: session.calls.load(Ordering::Relaxed),
                })
            }
            Some(next) if next.num_blocks() == current.num_blocks() => {
                return Err(SymbolicError::NoProgress { partial: current })
            }
            Some(next) => current = next,
        }
    }
}

/// `None` when `current` is already a backward equivalence. Otherwise splits
/// every block by drift value at the witness, where same-block variables are
/// equal.
fn bde_step(session: &Session, current: &Partition) -> Result<Option<Partition>, SymbolicError> {
    let phi = build_phi_bde(session.system, current);
    let SymbolicCheck::Witness(point) = session.decide(&phi, session.system.names(), current)? else {
        return Ok(None);
    };
    let values = session
        .system
        .expr_drifts()
        .iter()
        .map(|d| d.eval(&point))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| SymbolicError::InvalidWitness { partial: current.clone() })?;
    Ok(Some(current.split_by(&values)))
}

/// `None` when `current` is already a forward equivalence. Otherwise every
/// block on which the witness moves mass is regrouped by pairwise
/// compatibility with a group leader; compatibility is transitive, so one
/// query per member suffices.
fn fde_step(session: &Session, current: &Partition) -> Result<Option<Partition>, SymbolicError> {
    let n = session.system.len();
    let vars = primed_names(session.system.names());
    let psi = build_phi_fde(session.system, current);
    let SymbolicCheck::Witness(point) = session.decide(&psi, &vars, current)? else {
        return Ok(None);
    };
    let offending: Vec<usize> = (0..current.num_blocks())
        .filter(|&b| {
            let block = current.block(b);
            block.len() > 1 && block.iter().any(|&i| point[i] != point[n + i])
        })
        .collect();
    let regrouped: Vec<(usize, Vec<Vec<usize>>)> = offending
        .par_iter()
        .map(|&b| {
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for &m in current.block(b) {
                let mut placed = false;
                for g in groups.iter_mut() {
                    let pair = build_pair_fde(session.system, current, g[0], m);
                    if session.decide(&pair, &vars, current)? == SymbolicCheck::Valid {
                        g.push(m);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    groups.push(vec![m]);
                }
            }
            Ok((b, groups))
        })
        .collect::<Result<_, SymbolicError>>()?;

    let mut labels: Vec<(usize, usize)> = (0..n).map(|i| (current.block_of(i), 0)).collect();
    for (_, groups) in &regrouped {
        for (g, members) in groups.iter().enumerate() {
            for &m in members {
                labels[m].1 = g;
            }
        }
    }
    Ok(Some(current.split_by(&labels)))
}
