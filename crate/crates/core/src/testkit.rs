//! Deterministic generators for the randomized verification suites:
//! random polymatroids, random witnessed flow inequalities, and random
//! rule/database instances. Seeded ChaCha streams keep every suite
//! reproducible.

use crate::attrset::AttrSet;
use crate::proofseq::{FlowInequality, Pair, SparseVec};
use crate::rational::{rat_int, Rational};
use crate::relalg::{Database, Relation};
use crate::rule::{DegreeConstraint, DisjunctiveRule, Hypergraph};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random polymatroid as a dense vector over `2^n`, integer-valued.
///
/// Mixes three families: coverage functions (weight of the union of
/// per-variable ground subsets), scaled uniform-matroid ranks, and modular
/// functions. All are non-negative, monotone and submodular.
pub fn random_polymatroid(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    match rng.gen_range(0..4u32) {
        0 => {
            let cap = rng.gen_range(1..=n as u64);
            let scale = rng.gen_range(1..=3i64);
            (0..(1u32 << n))
                .map(|z| rat_int(scale * (z.count_ones() as u64).min(cap) as i64))
                .collect()
        }
        1 => {
            let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            (0..(1u32 << n))
                .map(|z| {
                    rat_int(
                        AttrSet::from_bits(z)
                            .iter()
                            .map(|v| weights[v])
                            .sum::<i64>(),
                    )
                })
                .collect()
        }
        _ => {
            // Coverage function over a small ground set.
            let ground = rng.gen_range(3..=8usize);
            let weights: Vec<i64> = (0..ground).map(|_| rng.gen_range(1..=4)).collect();
            let sets: Vec<u32> = (0..n)
                .map(|_| rng.gen_range(0..(1u32 << ground)))
                .collect();
            (0..(1u32 << n))
                .map(|z| {
                    let mut union = 0u32;
                    for v in AttrSet::from_bits(z).iter() {
                        union |= sets[v];
                    }
                    rat_int(
                        (0..ground)
                            .filter(|g| union & (1 << g) != 0)
                            .map(|g| weights[g])
                            .sum::<i64>(),
                    )
                })
                .collect()
        }
    }
}

/// A random witnessed Shannon flow inequality over `[n]`, every entry a
/// multiple of `1/denominator`.
///
/// Construction: sample sparse `δ`, `σ`, `μ` on the grid; repair any
/// negative inflow by raising the matching unconditional `δ` entry (which
/// feeds only that set); then pick targets among sets with positive inflow
/// and give them `λ` weights within the inflow. The result verifies by
/// construction.
pub fn random_valid_inequality(
    n: usize,
    denominator: u32,
    rng: &mut ChaCha8Rng,
) -> FlowInequality {
    let full = AttrSet::full(n);
    let denom = BigInt::from(denominator);
    fn grid(rng: &mut ChaCha8Rng, denom: &BigInt, max_num: u32) -> Rational {
        Rational::new(BigInt::from(rng.gen_range(1..=max_num)), denom.clone())
    }

    loop {
        let mut delta: SparseVec<Pair> = BTreeMap::new();
        let mut sigma: SparseVec<(AttrSet, AttrSet)> = BTreeMap::new();
        let mut mu: SparseVec<Pair> = BTreeMap::new();

        for _ in 0..rng.gen_range(1..=2 * n) {
            let y = AttrSet::from_bits(rng.gen_range(1..(1u32 << n)));
            let x_candidates: Vec<AttrSet> = y.subsets().filter(|s| *s != y).collect();
            let x = *x_candidates.choose(rng).unwrap();
            *delta
                .entry(Pair::new(x, y))
                .or_insert_with(Rational::zero) += grid(rng, &denom, denominator);
        }
        for _ in 0..rng.gen_range(0..=n) {
            let i = AttrSet::from_bits(rng.gen_range(1..(1u32 << n)));
            let j = AttrSet::from_bits(rng.gen_range(1..(1u32 << n)));
            if i.is_incomparable(j) {
                let key = if i <= j { (i, j) } else { (j, i) };
                *sigma.entry(key).or_insert_with(Rational::zero) += grid(rng, &denom, denominator);
            }
        }
        for _ in 0..rng.gen_range(0..=n) {
            let y = AttrSet::from_bits(rng.gen_range(1..(1u32 << n)));
            let x_candidates: Vec<AttrSet> = y.subsets().filter(|s| *s != y).collect();
            let x = *x_candidates.choose(rng).unwrap();
            *mu.entry(Pair::new(x, y)).or_insert_with(Rational::zero) += grid(rng, &denom, denominator);
        }

        let mut ineq = FlowInequality::new(n, BTreeMap::new(), delta, sigma, mu);
        // Repair negative inflows: δ_{Z|∅} feeds only inflow(Z).
        let inflow = ineq.inflow_all();
        for z in 1usize..(1 << n) {
            if inflow[z].is_negative() {
                let zset = AttrSet::from_bits(z as u32);
                *ineq
                    .delta
                    .entry(Pair::unconditional(zset))
                    .or_insert_with(Rational::zero) += -inflow[z].clone();
            }
        }

        let inflow = ineq.inflow_all();
        let mut candidates: Vec<AttrSet> = full
            .subsets()
            .filter(|z| !z.is_empty() && inflow[z.index()].is_positive())
            .collect();
        candidates.shuffle(rng);
        let take = rng.gen_range(1..=2.min(candidates.len().max(1)));
        let mut lambda: SparseVec<AttrSet> = BTreeMap::new();
        for b in candidates.into_iter().take(take) {
            // A grid multiple in (0, inflow(B)].
            let ticks = (&inflow[b.index()] * Rational::from_integer(denom.clone()))
                .to_integer();
            let max_ticks: u32 = ticks.try_into().unwrap_or(1);
            if max_ticks >= 1 {
                lambda.insert(
                    b,
                    Rational::new(BigInt::from(rng.gen_range(1..=max_ticks)), denom.clone()),
                );
            }
        }
        if lambda.is_empty() {
            continue;
        }
        ineq.lambda = lambda;
        debug_assert!(crate::proofseq::verify_witness(&ineq));
        return ineq;
    }
}

/// A random relation over the given schema with at most `max_tuples` rows
/// drawn from `[domain]`.
pub fn random_relation(
    schema: &[usize],
    max_tuples: usize,
    domain: u32,
    rng: &mut ChaCha8Rng,
) -> Relation {
    let count = rng.gen_range(1..=max_tuples);
    let rows = (0..count).map(|_| {
        (0..schema.len())
            .map(|_| rng.gen_range(0..domain))
            .collect::<Vec<u32>>()
    });
    Relation::new(schema.to_vec(), rows).unwrap()
}

/// A random connected-ish rule with measured cardinality constraints and
/// matching data: every variable covered, sizes taken from the generated
/// relations themselves.
pub fn random_rule_and_data(
    n: usize,
    max_tuples: usize,
    rng: &mut ChaCha8Rng,
) -> (DisjunctiveRule, Database) {
    let mut supports: Vec<AttrSet> = Vec::new();
    let mut covered = AttrSet::EMPTY;
    while covered != AttrSet::full(n) || supports.len() < 2 {
        let arity = rng.gen_range(1..=n.min(3));
        let mut s = AttrSet::EMPTY;
        // Bias towards uncovered variables so coverage terminates quickly.
        let missing: Vec<usize> = AttrSet::full(n).difference(covered).iter().collect();
        if let Some(&v) = missing.first() {
            s = s.insert(v);
        }
        while s.len() < arity {
            s = s.insert(rng.gen_range(0..n));
        }
        covered = covered.union(s);
        supports.push(s);
        if supports.len() > 2 * n + 2 {
            break;
        }
    }
    let h = Hypergraph::new(n, supports);
    let domain = rng.gen_range(2..=6u32);
    let mut data: Database = BTreeMap::new();
    let mut constraints = Vec::new();
    for (support, id) in &h.edges {
        let schema: Vec<usize> = support.iter().collect();
        let rel = random_relation(&schema, max_tuples, domain, rng);
        constraints
            .push(DegreeConstraint::cardinality(*support, rel.len() as u64, Some(*id)).unwrap());
        data.insert(*id, rel);
    }
    let rule = DisjunctiveRule::full_query(h, constraints);
    (rule, data)
}

/// Random nonempty targets for a rule body: each target is a union of a
/// couple of edge supports (so it is never trivially unbounded).
pub fn random_targets(rule: &DisjunctiveRule, count: usize, rng: &mut ChaCha8Rng) -> Vec<AttrSet> {
    let mut targets = Vec::new();
    for _ in 0..count {
        let mut t = AttrSet::EMPTY;
        for _ in 0..rng.gen_range(1..=2) {
            let (s, _) = rule.hypergraph.edges[rng.gen_range(0..rule.hypergraph.edges.len())];
            t = t.union(s);
        }
        targets.push(t);
    }
    targets.sort();
    targets.dedup();
    targets
}
