//! Quantifier-free formulas whose validity is a differential equivalence.

use crate::ir::{DriftExpr, EvalError, OdeSystem, Partition, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Eq(DriftExpr, DriftExpr),
    Le(DriftExpr, DriftExpr),
    Lt(DriftExpr, DriftExpr),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn eval(&self, values: &[Rational]) -> Result<bool, EvalError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => a.eval(values)? == b.eval(values)?,
            Formula::Le(a, b) => a.eval(values)? <= b.eval(values)?,
            Formula::Lt(a, b) => a.eval(values)? < b.eval(values)?,
            Formula::Not(f) => !f.eval(values)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(values)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(values)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !a.eval(values)? || b.eval(values)?,
        })
    }

    /// Every term occurring in an atom.
    pub fn terms(&self) -> Vec<&DriftExpr> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a DriftExpr>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => {
                out.push(a);
                out.push(b);
            }
            Formula::Not(f) => f.collect_terms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_terms(out)),
            Formula::Implies(a, b) => {
                a.collect_terms(out);
                b.collect_terms(out);
            }
        }
    }
}

/// `(AND x_rep = x_j) => (AND f_rep = f_j)` over every non-representative
/// `j`; `True` when no block has two members.
pub fn build_phi_bde(system: &OdeSystem, partition: &Partition) -> Formula {
    let drifts = system.expr_drifts();
    let mut antecedent = Vec::new();
    let mut consequent = Vec::new();
    for block in partition.blocks() {
        let rep = block[0];
        for &j in &block[1..] {
            antecedent.push(Formula::Eq(DriftExpr::Var(rep), DriftExpr::Var(j)));
            consequent.push(Formula::Eq(drifts[rep].clone(), drifts[j].clone()));
        }
    }
    if antecedent.is_empty() {
        return Formula::True;
    }
    Formula::implies(Formula::And(antecedent), Formula::And(consequent))
}

/// Two copies of the state, `x` (indices `0..n`) and `x'` (indices `n..2n`):
/// equal block sums imply equal block drift sums.
pub fn build_phi_fde(system: &OdeSystem, partition: &Partition) -> Formula {
    let n = system.len();
    let antecedent = partition.blocks().iter().map(|block| Formula::Eq(var_sum(block, 0), var_sum(block, n))).collect();
    Formula::implies(Formula::And(antecedent), Formula::And(block_drift_sums_agree(system, partition)))
}

/// Pairwise forward check for `i`, `j`: moving mass between `x_i` and `x_j`
/// with every other variable fixed leaves every block drift sum unchanged.
pub fn build_pair_fde(system: &OdeSystem, partition: &Partition, i: usize, j: usize) -> Formula {
    let n = system.len();
    let mut antecedent: Vec<Formula> =
        (0..n).filter(|&k| k != i && k != j).map(|k| Formula::Eq(DriftExpr::Var(k), DriftExpr::Var(n + k))).collect();
    antecedent.push(Formula::Eq(var_sum(&[i, j], 0), var_sum(&[i, j], n)));
    Formula::implies(Formula::And(antecedent), Formula::And(block_drift_sums_agree(system, partition)))
}

fn block_drift_sums_agree(system: &OdeSystem, partition: &Partition) -> Vec<Formula> {
    let n = system.len();
    let drifts = system.expr_drifts();
    partition
        .blocks()
        .iter()
        .map(|block| {
            let here = DriftExpr::sum(block.iter().map(|&i| drifts[i].clone()));
            let there = here.rename(|k| k + n);
            Formula::Eq(here, there)
        })
        .collect()
}

fn var_sum(block: &[usize], offset: usize) -> DriftExpr {
    DriftExpr::sum(block.iter().map(|&i| DriftExpr::Var(i + offset)))
}

/// Variable names for the two-copy forward encoding: `x` then `x'`.
pub fn primed_names(names: &[String]) -> Vec<String> {
    names.iter().cloned().chain(names.iter().map(|n| format!("{n}'"))).collect()
}
