#![allow(dead_code)]

use num_traits::Zero;
use odelump::ir::{Drifts, Exponents, Monomial, OdeSystem, Partition, Polynomial, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

pub fn part(n: usize, blocks: &[&[usize]]) -> Partition {
    Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
}

pub fn x(i: usize) -> Polynomial {
    Polynomial::var(i)
}

pub fn c(v: i64) -> Polynomial {
    Polynomial::constant(int(v))
}

/// `x1' = -x1, x2' = k1 x1 - x2, x3' = k2 x1 - x3`.
pub fn eq1(k1: i64, k2: i64) -> OdeSystem {
    eq1_with_init(k1, k2, vec![int(1), int(0), int(0)])
}

pub fn eq1_with_init(k1: i64, k2: i64, init: Vec<Rational>) -> OdeSystem {
    OdeSystem::polynomial(
        OdeSystem::default_names(3),
        vec![-x(0), &(&c(k1) * &x(0)) - &x(1), &(&c(k2) * &x(0)) - &x(2)],
        init,
    )
    .unwrap()
}

pub fn eq1_text(k1: &str, k2: &str) -> String {
    format!(
        "begin model
  begin init
    x1 = 1
    x2 = 0
    x3 = 0
  end init
  begin ode
    d(x1) = -x1
    d(x2) = {k1}*x1 - x2
    d(x3) = {k2}*x1 - x3
  end ode
  begin partition
    {{x1}}, {{x2, x3}}
  end partition
end model
"
    )
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> Exponents {
    let degree = rng.gen_range(0..=max_degree);
    let mut pairs: Vec<(usize, u32)> = Vec::new();
    for _ in 0..degree {
        let v = rng.gen_range(0..n);
        match pairs.iter_mut().find(|(w, _)| *w == v) {
            Some(p) => p.1 += 1,
            None => pairs.push((v, 1)),
        }
    }
    Exponents::from_pairs(pairs)
}

pub fn random_polynomial(rng: &mut ChaCha8Rng, n: usize, max_degree: u32, max_terms: usize) -> Polynomial {
    let terms = (0..rng.gen_range(0..=max_terms))
        .map(|_| {
            let mut coefficient = 0;
            while coefficient == 0 {
                coefficient = rng.gen_range(-3..=3);
            }
            Monomial { coefficient: int(coefficient), exponents: random_monomial(rng, n, max_degree) }
        })
        .collect();
    Polynomial::from_terms(terms)
}

/// `n` drifts of degree at most `max_degree` with integer coefficients in
/// `[-3, 3]`.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> OdeSystem {
    let drifts = (0..n).map(|_| random_polynomial(rng, n, max_degree, 4)).collect();
    let init = (0..n).map(|_| int(rng.gen_range(0..=2))).collect();
    OdeSystem::polynomial(OdeSystem::default_names(n), drifts, init).unwrap()
}

/// Averages `system` over a random involution of its variables, so the
/// involution's orbits form a nontrivial backward equivalence.
pub fn symmetrize(rng: &mut ChaCha8Rng, system: &OdeSystem) -> OdeSystem {
    let n = system.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut sigma: Vec<usize> = (0..n).collect();
    for pair in order.chunks(2).take(rng.gen_range(1..=n / 2)) {
        if let [a, b] = *pair {
            sigma.swap(a, b);
        }
    }
    let f = system.polynomial_drifts().unwrap();
    let drifts = (0..n).map(|i| &f[i] + &f[sigma[i]].rename(|v| sigma[v])).collect();
    OdeSystem::polynomial(system.names().to_vec(), drifts, system.init().to_vec()).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, n_range: std::ops::RangeInclusive<usize>) -> OdeSystem {
    let n = rng.gen_range(n_range);
    let s = random_system(rng, n, 2);
    if rng.gen_bool(0.4) {
        symmetrize(rng, &s)
    } else {
        s
    }
}

/// `copies` replicas of a 10-variable motif coupled to the next replica.
/// Variable `10 c + k` has drift
/// `-(k+1) x_{c,k} + x_{c,k+1} x_{c+1,k} + (k+1)`, so the coarsest backward
/// equivalence groups variables by `k` alone.
pub fn replicated_motif(copies: usize) -> OdeSystem {
    let n = copies * 10;
    let at = |c: usize, k: usize| 10 * (c % copies) + k % 10;
    let drifts = (0..n)
        .map(|v| {
            let (cp, k) = (v / 10, v % 10);
            let kk = int(k as i64 + 1);
            Polynomial::from_terms(vec![
                Monomial { coefficient: -kk.clone(), exponents: Exponents::var(v) },
                Monomial {
                    coefficient: int(1),
                    exponents: Exponents::from_pairs(vec![(at(cp, k + 1), 1), (at(cp + 1, k), 1)]),
                },
                Monomial { coefficient: kk, exponents: Exponents::one() },
            ])
        })
        .collect();
    OdeSystem::polynomial(OdeSystem::default_names(n), drifts, vec![Rational::zero(); n]).unwrap()
}

pub fn with_drifts(system: &OdeSystem, drifts: Drifts) -> OdeSystem {
    OdeSystem::new(system.names().to_vec(), drifts, system.init().to_vec(), system.observables().clone()).unwrap()
}

/// Property-test configuration with a fixed RNG seed, so every run explores
/// the same cases.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x0de1),
        failure_persistence: None,
        ..Default::default()
    }
}

pub mod strategies {
    use super::*;
    use proptest::prelude::*;

    /// Monomials of degree at most `max_degree` over `n` variables.
    pub fn exponents(n: usize, max_degree: u32) -> impl Strategy<Value = Exponents> {
        prop::collection::vec(0..n, 0..=max_degree as usize).prop_map(|vars| {
            let mut pairs: Vec<(usize, u32)> = Vec::new();
            for v in vars {
                match pairs.iter_mut().find(|(w, _)| *w == v) {
                    Some(p) => p.1 += 1,
                    None => pairs.push((v, 1)),
                }
            }
            Exponents::from_pairs(pairs)
        })
    }

    pub fn coefficient() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=3).prop_filter_map("nonzero", |(p, q)| (p != 0).then(|| ratio(p, q)))
    }

    /// Raw, possibly unnormalized term lists.
    pub fn terms(n: usize, max_degree: u32, max_terms: usize) -> impl Strategy<Value = Vec<Monomial>> {
        prop::collection::vec(
            (coefficient(), exponents(n, max_degree))
                .prop_map(|(coefficient, exponents)| Monomial { coefficient, exponents }),
            0..=max_terms,
        )
    }

    pub fn polynomial(n: usize, max_degree: u32) -> impl Strategy<Value = Polynomial> {
        terms(n, max_degree, 5).prop_map(Polynomial::from_terms)
    }

    pub fn system(n: usize, max_degree: u32) -> impl Strategy<Value = OdeSystem> {
        prop::collection::vec(polynomial(n, max_degree), n).prop_map(move |drifts| {
            OdeSystem::polynomial(OdeSystem::default_names(n), drifts, vec![Rational::zero(); n]).unwrap()
        })
    }

    /// A system of random size in `2..=max_n` with a random seed partition.
    pub fn system_and_seed(max_n: usize, max_degree: u32) -> impl Strategy<Value = (OdeSystem, Partition)> {
        (2..=max_n).prop_flat_map(move |n| {
            (system(n, max_degree), prop::collection::vec(0..3usize, n))
                .prop_map(|(s, labels)| (s, Partition::from_labels(&labels)))
        })
    }

    /// Seeded instance from the same generator as the oracle suite, with a
    /// chance of symmetry.
    pub fn seeded_instance(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = OdeSystem> {
        any::<u64>().prop_map(move |seed| {
            use rand::SeedableRng;
            random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n.clone())
        })
    }

    pub fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
    }
}
