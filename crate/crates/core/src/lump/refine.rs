//! Coarsest equivalences by signature refinement.
//!
//! Each pass assigns every variable a signature computed from the current
//! partition and splits blocks whose members disagree. Every equivalence that
//! refines the current partition also refines the split one, so the fixpoint
//! is the coarsest equivalence refining the seed.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{polynomial_drifts, LumpError, Mode};
use crate::ir::{OdeSystem, Partition, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    pub partition: Partition,
    /// Passes run, including the final one that changed nothing.
    pub iterations: usize,
    /// Block count after each pass.
    pub block_counts: Vec<usize>,
}

pub fn coarsest(system: &OdeSystem, seed: &Partition, mode: Mode) -> Result<Partition, LumpError> {
    refine(system, seed, mode).map(|r| r.partition)
}

pub fn coarsest_bde(system: &OdeSystem, seed: &Partition) -> Result<Partition, LumpError> {
    coarsest(system, seed, Mode::Backward)
}

pub fn coarsest_fde(system: &OdeSystem, seed: &Partition) -> Result<Partition, LumpError> {
    coarsest(system, seed, Mode::Forward)
}

pub fn refine(system: &OdeSystem, seed: &Partition, mode: Mode) -> Result<Refinement, LumpError> {
    let drifts = polynomial_drifts(system, seed)?;
    let mut current = seed.clone();
    let mut block_counts = Vec::new();
    loop {
        let next = match mode {
            Mode::Backward => current.split_by(&backward_signatures(drifts, &current)),
            Mode::Forward => current.split_by(&forward_signatures(drifts, &current)),
        };
        block_counts.push(next.num_blocks());
        if next.num_blocks() == current.num_blocks() {
            return Ok(Refinement { partition: current, iterations: block_counts.len(), block_counts });
        }
        current = next;
    }
}

/// Drift with every variable renamed to its block ordinal.
fn backward_signatures(drifts: &[Polynomial], partition: &Partition) -> Vec<Polynomial> {
    drifts.par_iter().map(|d| d.rename(|i| partition.block_of(i))).collect()
}

/// For each variable `i`, the list of `(B, dF_B/dx_i)` over blocks `B` whose
/// drift sum depends on `x_i`, ordered by block.
fn forward_signatures(drifts: &[Polynomial], partition: &Partition) -> Vec<Vec<(usize, Polynomial)>> {
    let per_block: Vec<HashMap<usize, Polynomial>> = partition
        .blocks()
        .par_iter()
        .map(|block| block.iter().map(|&i| drifts[i].clone()).sum::<Polynomial>().gradient())
        .collect();
    let mut sigs: Vec<Vec<(usize, Polynomial)>> = vec![Vec::new(); drifts.len()];
    for (b, gradient) in per_block.into_iter().enumerate() {
        for (var, partial) in gradient {
            if !partial.is_zero() {
                sigs[var].push((b, partial));
            }
        }
    }
    // blocks were visited in order, so each list is already sorted by block
    sigs
}
