//! Exhaustive search for the coarsest equivalence, for small systems only.

use super::check::check;
use super::{polynomial_drifts, LumpError, Mode};
use crate::ir::{OdeSystem, Partition};

/// Largest system the oracle accepts (Bell(10) = 115975 candidates).
pub const ORACLE_MAX_VARS: usize = 10;

/// Enumerates every partition refining `seed`, keeps those passing the exact
/// check, and returns the one every other passing partition refines.
pub fn brute_force_coarsest(system: &OdeSystem, seed: &Partition, mode: Mode) -> Result<Partition, LumpError> {
    polynomial_drifts(system, seed)?;
    let n = system.len();
    if n > ORACLE_MAX_VARS {
        return Err(LumpError::TooLarge(n));
    }
    let mut passing: Vec<Partition> = Vec::new();
    let mut failure = None;
    for_each_refinement(seed, &mut |candidate| {
        if failure.is_some() {
            return;
        }
        match check(system, &candidate, mode) {
            Ok(r) if r.is_ok() => passing.push(candidate),
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let best = passing.iter().min_by_key(|p| p.num_blocks()).expect("the discrete partition always passes").clone();
    for p in &passing {
        if !p.refines(&best).expect("same ground set") {
            return Err(LumpError::NoUniqueCoarsest);
        }
    }
    Ok(best)
}

/// Visits every partition refining `seed`: element `i` either opens a new
/// block or joins an open block drawn from its own seed block.
fn for_each_refinement(seed: &Partition, visit: &mut impl FnMut(Partition)) {
    let n = seed.len();
    let mut labels = vec![0usize; n];
    // seed block of each open block
    let mut open: Vec<usize> = Vec::new();
    fn go(
        i: usize,
        seed: &Partition,
        labels: &mut Vec<usize>,
        open: &mut Vec<usize>,
        visit: &mut impl FnMut(Partition),
    ) {
        if i == seed.len() {
            visit(Partition::from_labels(labels));
            return;
        }
        let home = seed.block_of(i);
        for b in 0..open.len() {
            if open[b] == home {
                labels[i] = b;
                go(i + 1, seed, labels, open, visit);
            }
        }
        labels[i] = open.len();
        open.push(home);
        go(i + 1, seed, labels, open, visit);
        open.pop();
    }
    if n == 0 {
        visit(Partition::one_block(0));
        return;
    }
    go(0, seed, &mut labels, &mut open, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::int;
    use crate::ir::Polynomial;
    use crate::lump::fixtures::{eq1_int, part};

    fn count(seed: &Partition) -> usize {
        let mut k = 0;
        for_each_refinement(seed, &mut |_| k += 1);
        k
    }

    #[test]
    fn enumeration_counts_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(count(&Partition::one_block(n)), b, "n={n}");
        }
        // refinements of {{0,1},{2,3,4}} = Bell(2) * Bell(3)
        assert_eq!(count(&part(5, &[&[0, 1], &[2, 3, 4]])), 2 * 5);
    }

    #[test]
    fn enumeration_yields_refinements_only() {
        let seed = part(4, &[&[0, 3], &[1, 2]]);
        for_each_refinement(&seed, &mut |p| assert!(p.refines(&seed).unwrap()));
    }

    #[test]
    fn oracle_examples() {
        let s = eq1_int(1, 1);
        let one = Partition::one_block(3);
        assert_eq!(brute_force_coarsest(&s, &one, Mode::Backward).unwrap(), part(3, &[&[0], &[1, 2]]));
        assert_eq!(brute_force_coarsest(&s, &one, Mode::Forward).unwrap(), part(3, &[&[0], &[1, 2]]));
        let s = eq1_int(1, 2);
        assert!(brute_force_coarsest(&s, &one, Mode::Backward).unwrap().is_discrete());
    }

    #[test]
    fn oracle_single_variable() {
        let s = OdeSystem::polynomial(vec!["x1".into()], vec![Polynomial::var(0)], vec![int(0)]).unwrap();
        assert_eq!(
            brute_force_coarsest(&s, &Partition::one_block(1), Mode::Backward).unwrap(),
            Partition::one_block(1)
        );
    }

    #[test]
    fn oracle_guard() {
        let n = 11;
        let s =
            OdeSystem::polynomial(OdeSystem::default_names(n), vec![Polynomial::zero(); n], vec![int(0); n]).unwrap();
        assert_eq!(brute_force_coarsest(&s, &Partition::one_block(n), Mode::Forward), Err(LumpError::TooLarge(11)));
    }
}
