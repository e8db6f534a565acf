//! Reduced systems for a given equivalence, and seed partitions.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::Zero;

use super::check::{check_bde, check_fde};
use super::{polynomial_drifts, CheckResult, LumpError, Mode};
use crate::ir::{DriftExpr, Drifts, OdeSystem, Partition, Polynomial, Rational};

/// A block of a backward reduction whose members start from different values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitMismatch {
    pub block: usize,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardReduction {
    pub system: OdeSystem,
    /// Non-empty when the reduced model does not reproduce the original
    /// dynamics because a block is not uniformly initialized.
    pub warnings: Vec<InitMismatch>,
}

/// Reduction for `mode`; warnings are only produced in backward mode.
pub fn reduce(system: &OdeSystem, partition: &Partition, mode: Mode) -> Result<BackwardReduction, LumpError> {
    match mode {
        Mode::Forward => {
            reduce_forward(system, partition).map(|system| BackwardReduction { system, warnings: Vec::new() })
        }
        Mode::Backward => reduce_backward(system, partition),
    }
}

/// One macro-variable per block standing for the sum of its members. Each
/// original variable is replaced by an equal share of its block's
/// macro-variable, which is exact because the block drift sums depend on the
/// state only through block sums.
pub fn reduce_forward(system: &OdeSystem, partition: &Partition) -> Result<OdeSystem, LumpError> {
    let drifts = polynomial_drifts(system, partition)?;
    if let CheckResult::Counterexample(c) = check_fde(system, partition)? {
        return Err(LumpError::NotAnFde(Box::new(c)));
    }
    let share: HashMap<usize, Polynomial> = (0..system.len())
        .map(|i| {
            let b = partition.block_of(i);
            let size = Rational::from_integer(partition.block(b).len().into());
            (i, Polynomial::var(b).scale(&size.recip()))
        })
        .collect();
    let reduced: Vec<Polynomial> = partition
        .blocks()
        .iter()
        .map(|block| block.iter().map(|&i| drifts[i].clone()).sum::<Polynomial>().substitute(&share))
        .collect();
    let init = partition
        .blocks()
        .iter()
        .map(|block| block.iter().fold(Rational::zero(), |acc, &i| acc + &system.init()[i]))
        .collect();
    let names = macro_names(system.names(), partition);
    let observables = system.observables().iter().map(|&o| partition.block_of(o)).collect();
    Ok(OdeSystem::new(names, Drifts::Polynomial(reduced), init, observables).expect("reduced system is well formed"))
}

/// Keeps the minimum-index member of each block and rewrites every other
/// member to it.
pub fn reduce_backward(system: &OdeSystem, partition: &Partition) -> Result<BackwardReduction, LumpError> {
    let drifts = polynomial_drifts(system, partition)?;
    if let CheckResult::Counterexample(c) = check_bde(system, partition)? {
        return Err(LumpError::NotABde(Box::new(c)));
    }
    let mut names = Vec::with_capacity(partition.num_blocks());
    let mut reduced = Vec::with_capacity(partition.num_blocks());
    let mut init = Vec::with_capacity(partition.num_blocks());
    let mut warnings = Vec::new();
    for (b, block) in partition.blocks().iter().enumerate() {
        let rep = block[0];
        names.push(system.names()[rep].clone());
        reduced.push(drifts[rep].rename(|i| partition.block_of(i)));
        init.push(system.init()[rep].clone());
        if block.iter().any(|&i| system.init()[i] != system.init()[rep]) {
            warnings
                .push(InitMismatch { block: b, members: block.iter().map(|&i| system.names()[i].clone()).collect() });
        }
    }
    let observables = system.observables().iter().map(|&o| partition.block_of(o)).collect();
    let system =
        OdeSystem::new(names, Drifts::Polynomial(reduced), init, observables).expect("reduced system is well formed");
    Ok(BackwardReduction { system, warnings })
}

/// Reduction for `mode` without any equivalence check, for partitions
/// established by other means such as the symbolic backend. Accepts
/// non-polynomial drifts.
pub fn reduce_unchecked(system: &OdeSystem, partition: &Partition, mode: Mode) -> Result<BackwardReduction, LumpError> {
    if partition.len() != system.len() {
        return Err(LumpError::PartitionMismatch { expected: system.len(), found: partition.len() });
    }
    let drifts = system.expr_drifts();
    let observables = system.observables().iter().map(|&o| partition.block_of(o)).collect();
    let (names, reduced, init, warnings) = match mode {
        Mode::Forward => {
            let share = |i: usize| {
                let b = partition.block_of(i);
                let size = Rational::from_integer(partition.block(b).len().into());
                if partition.block(b).len() == 1 {
                    DriftExpr::Var(b)
                } else {
                    DriftExpr::mul(DriftExpr::Const(size.recip()), DriftExpr::Var(b))
                }
            };
            let reduced = partition
                .blocks()
                .iter()
                .map(|block| DriftExpr::sum(block.iter().map(|&i| drifts[i].substitute(&share))))
                .collect();
            let init = partition
                .blocks()
                .iter()
                .map(|block| block.iter().fold(Rational::zero(), |acc, &i| acc + &system.init()[i]))
                .collect();
            (macro_names(system.names(), partition), reduced, init, Vec::new())
        }
        Mode::Backward => {
            let mut warnings = Vec::new();
            for (b, block) in partition.blocks().iter().enumerate() {
                if block.iter().any(|&i| system.init()[i] != system.init()[block[0]]) {
                    warnings.push(InitMismatch {
                        block: b,
                        members: block.iter().map(|&i| system.names()[i].clone()).collect(),
                    });
                }
            }
            let blocks = partition.blocks();
            (
                blocks.iter().map(|b| system.names()[b[0]].clone()).collect(),
                blocks.iter().map(|b| drifts[b[0]].rename(|i| partition.block_of(i))).collect(),
                blocks.iter().map(|b| system.init()[b[0]].clone()).collect(),
                warnings,
            )
        }
    };
    let system = OdeSystem::new(names, Drifts::Expr(reduced).normalized(), init, observables)
        .expect("reduced system is well formed");
    Ok(BackwardReduction { system, warnings })
}

/// Refines `seed` so that same-block variables share their initial value and
/// every observable sits alone.
pub fn prepartition_from_inits(system: &OdeSystem, seed: &Partition) -> Result<Partition, LumpError> {
    if seed.len() != system.len() {
        return Err(LumpError::PartitionMismatch { expected: system.len(), found: seed.len() });
    }
    let labels: Vec<(&Rational, Option<usize>)> =
        (0..system.len()).map(|i| (&system.init()[i], system.observables().contains(&i).then_some(i))).collect();
    Ok(seed.split_by(&labels))
}

/// Macro-variable names: members joined by `_`, suffixed when that collides.
pub(crate) fn macro_names(names: &[String], partition: &Partition) -> Vec<String> {
    let mut used: HashSet<String> = HashSet::new();
    partition
        .blocks()
        .iter()
        .map(|block| {
            let base = block.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join("_");
            let mut name = base.clone();
            let mut k = 2;
            while !used.insert(name.clone()) {
                name = format!("{base}_{k}");
                k += 1;
            }
            name
        })
        .collect()
}

/// Observables of `system` that are not alone in their block.
pub fn shared_observables(system: &OdeSystem, partition: &Partition) -> BTreeSet<usize> {
    system.observables().iter().copied().filter(|&o| partition.block(partition.block_of(o)).len() > 1).collect()
}
