//! Exhaustive bound-identity suite over small hypergraphs with
//! power-of-two sizes: the modular/polymatroid collapse, the
//! subadditive/integral-edge-cover identity, the subadditive/vertex-bound
//! collapse under per-variable constraints, and the bound chain.

use pandaq_core::attrset::AttrSet;
use pandaq_core::bounds::{
    agm_bound, integral_edge_cover_bound, size_bound, vertex_bound,
};
use pandaq_core::rational::{rat_int, Rational};
use pandaq_core::rule::{DegreeConstraint, DisjunctiveRule, FunctionClass, Hypergraph};
use pandaq_core::testkit::rng;
use rand::Rng;

/// All hypergraphs with `n <= 4`, at most `max_edges` distinct edges,
/// every variable covered.
fn small_hypergraphs(max_n: usize, max_edges: usize) -> Vec<Hypergraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let supports: Vec<AttrSet> = AttrSet::full(n)
            .subsets()
            .filter(|s| !s.is_empty())
            .collect();
        let m = supports.len();
        // Subsets of the support list with at most max_edges members.
        for mask in 1u32..(1 << m) {
            if mask.count_ones() as usize > max_edges {
                continue;
            }
            let chosen: Vec<AttrSet> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| supports[i])
                .collect();
            let covered = chosen.iter().fold(AttrSet::EMPTY, |a, s| a.union(*s));
            if covered != AttrSet::full(n) {
                continue;
            }
            out.push(Hypergraph::new(n, chosen));
        }
    }
    out
}

fn with_power_of_two_sizes(h: &Hypergraph) -> DisjunctiveRule {
    // Deterministic power-of-two sizes cycling 2, 4, 8, 16 by edge index.
    let constraints = h
        .edges
        .iter()
        .enumerate()
        .map(|(i, (s, id))| {
            DegreeConstraint::cardinality(*s, 2u64 << (i % 4), Some(*id)).unwrap()
        })
        .collect();
    DisjunctiveRule::full_query(h.clone(), constraints)
}

#[test]
fn modular_equals_polymatroid_with_cardinality_constraints() {
    // The modularization identity, checked on every small hypergraph.
    let mut checked = 0;
    for h in small_hypergraphs(4, 4) {
        let rule = with_power_of_two_sizes(&h);
        let modular = size_bound(FunctionClass::Modular, &rule).unwrap();
        let poly = size_bound(FunctionClass::Polymatroid, &rule).unwrap();
        assert_eq!(
            modular.objective, poly.objective,
            "hypergraph {:?}",
            h.edges
        );
        checked += 1;
    }
    println!("modular = polymatroid on {checked} hypergraphs");
    assert!(checked > 1000);
}

#[test]
fn subadditive_equals_integral_edge_cover() {
    let mut checked = 0;
    for h in small_hypergraphs(4, 4) {
        let rule = with_power_of_two_sizes(&h);
        let sa = size_bound(FunctionClass::Subadditive, &rule).unwrap();
        let iec = integral_edge_cover_bound(&rule).unwrap();
        assert_eq!(
            sa.objective,
            *iec.log_value.bits(),
            "hypergraph {:?}",
            h.edges
        );
        checked += 1;
    }
    println!("subadditive = integral edge cover on {checked} hypergraphs");
}

#[test]
fn subadditive_with_vertex_constraints_equals_vertex_bound() {
    // Per-variable constraints collapse every class to n · log N.
    let log_n = rat_int(2); // N = 4
    for h in small_hypergraphs(4, 4) {
        let constraints: Vec<DegreeConstraint> = (0..h.n)
            .map(|v| DegreeConstraint::cardinality(AttrSet::singleton(v), 4, None).unwrap())
            .collect();
        // Per-variable constraints need a guard edge containing {v}; only
        // hypergraphs whose every variable appears are eligible (always
        // true here), and any covering edge guards the constraint.
        let rule = DisjunctiveRule::full_query(h.clone(), constraints);
        let expect = &log_n * rat_int(h.n as i64);
        for class in [
            FunctionClass::Modular,
            FunctionClass::Polymatroid,
            FunctionClass::Subadditive,
        ] {
            let sb = size_bound(class, &rule).unwrap();
            assert_eq!(sb.objective, expect, "class {class} on {:?}", h.edges);
        }
    }
}

#[test]
fn bound_chain_vertex_iec_agm() {
    for h in small_hypergraphs(4, 4) {
        let rule = with_power_of_two_sizes(&h);
        let vb = vertex_bound(&rule).unwrap();
        let iec = integral_edge_cover_bound(&rule).unwrap();
        let agm = agm_bound(&rule).unwrap();
        assert!(vb.log_value.bits() >= iec.log_value.bits());
        assert!(iec.log_value.bits() >= agm.log_value.bits());
    }
}

#[test]
fn modularization_on_random_targets() {
    // The collapse holds for any fixed target set, not just [n].
    let mut r = rng(0xb0b0_0001);
    for _ in 0..40 {
        let n = r.gen_range(2..=5usize);
        let edge_count = r.gen_range(2..=4usize);
        let supports: Vec<AttrSet> = AttrSet::full(n)
            .subsets()
            .filter(|s| !s.is_empty())
            .collect();
        let mut chosen = Vec::new();
        let mut covered = AttrSet::EMPTY;
        while covered != AttrSet::full(n) || chosen.len() < edge_count {
            let s = supports[r.gen_range(0..supports.len())];
            covered = covered.union(s);
            chosen.push(s);
            if chosen.len() > 6 {
                break;
            }
        }
        if covered != AttrSet::full(n) {
            continue;
        }
        let h = Hypergraph::new(n, chosen);
        let constraints = h
            .edges
            .iter()
            .map(|(s, id)| {
                DegreeConstraint::cardinality(*s, 1u64 << r.gen_range(1..=4), Some(*id)).unwrap()
            })
            .collect();
        let mut rule = DisjunctiveRule::full_query(h, constraints);
        let b = AttrSet::from_bits(r.gen_range(1..(1u32 << n)));
        rule.targets = vec![b];
        let modular = size_bound(FunctionClass::Modular, &rule).unwrap();
        let poly = size_bound(FunctionClass::Polymatroid, &rule).unwrap();
        assert_eq!(modular.objective, poly.objective, "target {b}");
    }
}

#[test]
fn agm_examples_regress() {
    // Triangle at unit logs: 3/2; four-cycle: 2.
    let tri = Hypergraph::new(
        3,
        vec![
            AttrSet::from_iter([0, 1]),
            AttrSet::from_iter([1, 2]),
            AttrSet::from_iter([2, 0]),
        ],
    );
    let constraints = tri
        .edges
        .iter()
        .map(|(s, id)| DegreeConstraint::cardinality(*s, 2, Some(*id)).unwrap())
        .collect();
    let rule = DisjunctiveRule::full_query(tri, constraints);
    assert_eq!(
        *agm_bound(&rule).unwrap().log_value.bits(),
        Rational::new(3.into(), 2.into())
    );
}
