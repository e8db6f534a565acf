use num_traits::Zero;

use super::{polynomial_drifts, CheckResult, Counterexample, LumpError, Mode};
use crate::ir::rational::int;
use crate::ir::{OdeSystem, Partition, Polynomial, Rational};

pub fn check(system: &OdeSystem, partition: &Partition, mode: Mode) -> Result<CheckResult, LumpError> {
    match mode {
        Mode::Forward => check_fde(system, partition),
        Mode::Backward => check_bde(system, partition),
    }
}

/// Same-block variables must have identical drifts once every variable is
/// replaced by its block representative.
pub fn check_bde(system: &OdeSystem, partition: &Partition) -> Result<CheckResult, LumpError> {
    let drifts = polynomial_drifts(system, partition)?;
    for (b, block) in partition.blocks().iter().enumerate() {
        let Some((&rep, rest)) = block.split_first() else { continue };
        let rep_drift = drifts[rep].rename(|i| partition.representative(i));
        for &other in rest {
            let other_drift = drifts[other].rename(|i| partition.representative(i));
            if other_drift != rep_drift {
                let witness = &rep_drift - &other_drift;
                let assignment = nonzero_point(&witness, system.len());
                return Ok(CheckResult::Counterexample(Counterexample {
                    block: b,
                    pair: (rep, other),
                    sum_block: None,
                    witness,
                    assignment,
                }));
            }
        }
    }
    Ok(CheckResult::Ok)
}

/// For every block `B` with drift sum `F_B`, the partial derivatives of `F_B`
/// must agree across the members of each block.
pub fn check_fde(system: &OdeSystem, partition: &Partition) -> Result<CheckResult, LumpError> {
    let drifts = polynomial_drifts(system, partition)?;
    let zero = Polynomial::zero();
    for (sb, sum_block) in partition.blocks().iter().enumerate() {
        let sum: Polynomial = sum_block.iter().map(|&i| drifts[i].clone()).sum();
        let gradient = sum.gradient();
        let partial = |i: usize| gradient.get(&i).unwrap_or(&zero);
        for (b, block) in partition.blocks().iter().enumerate() {
            let Some((&rep, rest)) = block.split_first() else { continue };
            for &other in rest {
                if partial(rep) != partial(other) {
                    let witness = partial(rep) - partial(other);
                    let assignment = nonzero_point(&witness, system.len());
                    return Ok(CheckResult::Counterexample(Counterexample {
                        block: b,
                        pair: (rep, other),
                        sum_block: Some(sb),
                        witness,
                        assignment,
                    }));
                }
            }
        }
    }
    Ok(CheckResult::Ok)
}

/// Searches a fixed sequence of small integer points for one where `p` does
/// not vanish.
pub(crate) fn nonzero_point(p: &Polynomial, n: usize) -> Option<Vec<Rational>> {
    if p.is_zero() {
        return None;
    }
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for attempt in 0..64 {
        let point: Vec<Rational> = (0..n)
            .map(|_| {
                if attempt == 0 {
                    return int(1);
                }
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                int(((state >> 33) % 19) as i64 - 9)
            })
            .collect();
        if !p.eval(&point).is_zero() {
            return Some(point);
        }
    }
    None
}
