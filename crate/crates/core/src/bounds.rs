//! The bound zoo: vertex bound, integral edge cover, fractional edge cover
//! (AGM), and the degree-aware polymatroid/subadditive/modular size bounds,
//! together with set-function classification and the polymatroid gap
//! fixtures.

use crate::attrset::AttrSet;
use crate::error::Error;
use crate::proofseq::{verify_witness, FlowInequality, Pair, SparseVec};
use crate::rational::{rat_int, LogQuantity, Rational};
use crate::ratlp::{solve_fixed_lambda, solve_maximin, SolvedBound};
use crate::rule::{DegreeConstraint, DisjunctiveRule, FunctionClass, Hypergraph, RelId};
use num_traits::Zero;
use std::collections::BTreeMap;

/// A dense set function over `2^[n]`, `h(∅) = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetFunction {
    pub n: usize,
    values: Vec<Rational>,
}

impl SetFunction {
    pub fn new(n: usize, values: Vec<Rational>) -> SetFunction {
        assert_eq!(values.len(), 1 << n);
        assert!(values[0].is_zero(), "set functions fix h(∅) = 0");
        SetFunction { n, values }
    }

    /// Defined by a list of closed sets with values: `h(Z)` is the minimum
    /// value over closed sets containing `Z`.
    pub fn from_closed_sets(n: usize, closed: &[(AttrSet, i64)]) -> SetFunction {
        let mut values = Vec::with_capacity(1 << n);
        for z in 0usize..(1 << n) {
            let zset = AttrSet::from_bits(z as u32);
            let v = closed
                .iter()
                .filter(|(c, _)| zset.is_subset(*c))
                .map(|(_, v)| *v)
                .min()
                .unwrap_or_else(|| panic!("no closed set contains {zset}"));
            values.push(rat_int(v));
        }
        SetFunction { n, values }
    }

    pub fn value(&self, z: AttrSet) -> &Rational {
        &self.values[z.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn scale(&self, s: &Rational) -> SetFunction {
        SetFunction {
            n: self.n,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

/// Classification flags for a set function, each decided by exhaustively
/// checking the defining inequalities.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ClassFlags {
    pub modular: bool,
    pub submodular: bool,
    pub subadditive: bool,
    pub monotone: bool,
    pub satisfies_constraints: bool,
}

/// Exhaustive classification of `f` against the class definitions and a
/// constraint family.
pub fn classify_set_function(f: &SetFunction, constraints: &[DegreeConstraint]) -> ClassFlags {
    let n = f.n;
    let full = AttrSet::full(n);

    let mut modular = true;
    for z in full.subsets() {
        let sum: Rational = z.iter().map(|v| f.value(AttrSet::singleton(v)).clone()).sum();
        if *f.value(z) != sum {
            modular = false;
            break;
        }
    }

    let mut monotone = true;
    'mono: for z in full.subsets() {
        for v in 0..n {
            if !z.contains(v) && f.value(z) > f.value(z.insert(v)) {
                monotone = false;
                break 'mono;
            }
        }
    }

    let mut submodular = true;
    let mut subadditive = true;
    for x in full.subsets() {
        for y in full.subsets() {
            if y < x {
                continue;
            }
            let union = f.value(x.union(y));
            let sum = f.value(x) + f.value(y);
            if *union > sum {
                subadditive = false;
            }
            if union + f.value(x.intersect(y)) > sum {
                submodular = false;
            }
        }
    }

    let satisfies_constraints = constraints
        .iter()
        .all(|c| f.value(c.y) - f.value(c.x) <= *c.log_bound.bits());

    ClassFlags {
        modular,
        submodular,
        subadditive,
        monotone,
        satisfies_constraints,
    }
}

/// Which bound an operation computed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundKind {
    Vertex,
    IntegralEdgeCover,
    Agm,
    SizeBound,
}

/// Re-checkable evidence attached to a bound value.
#[derive(Clone, Debug)]
pub enum Certificate {
    /// Nothing to check beyond arithmetic.
    Trivial,
    /// A 0/1 edge cover: the chosen relation occurrences.
    Cover(Vec<RelId>),
    /// A fractional edge cover: weight per relation occurrence.
    FractionalCover(Vec<(RelId, Rational)>),
    /// Target weights with the dual flow-inequality witness.
    FlowWitness {
        lambda: Vec<(AttrSet, Rational)>,
        ineq: FlowInequality,
    },
}

/// A computed bound with its certificate.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub class: Option<FunctionClass>,
    pub log_value: LogQuantity,
    pub certificate: Certificate,
}

/// Full result of a degree-aware size-bound solve: value, weights, dual
/// flow inequality, and the per-constraint dual split the evaluation
/// engine needs for degree support.
#[derive(Clone, Debug)]
pub struct SizeBound {
    pub class: FunctionClass,
    /// `max_{h ∈ class ∩ constraints} min_B h(B)`, in bits.
    pub objective: Rational,
    pub lambda: Vec<(AttrSet, Rational)>,
    /// The certified Shannon flow inequality `⟨λ, h⟩ ≤ ⟨δ, h⟩`.
    pub ineq: FlowInequality,
    /// Dual weight per declared constraint (row-level, before pair
    /// aggregation).
    pub delta_by_constraint: Vec<Rational>,
    /// Optimal primal set function, dense over `2^n`.
    pub optimal_h: Vec<Rational>,
    /// True when the maximin optimum was zero and `λ` fell back to the
    /// uniform vector.
    pub degenerate: bool,
}

fn validated(rule: &DisjunctiveRule) -> Result<(), Error> {
    let diags = crate::rule::validate_rule(rule);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::Domain(format!("invalid rule: {}", diags[0])))
    }
}

/// Builds the flow inequality from a solved bound LP and verifies the
/// witness: `Σ δ·n` equals the objective exactly and every inflow covers
/// its target weight.
pub fn extract_witness(rule: &DisjunctiveRule, solved: &SolvedBound) -> Result<FlowInequality, Error> {
    let mut lambda: SparseVec<AttrSet> = BTreeMap::new();
    for (b, w) in &solved.lambda {
        if !w.is_zero() {
            *lambda.entry(*b).or_insert_with(Rational::zero) += w;
        }
    }
    let mut delta: SparseVec<Pair> = BTreeMap::new();
    let mut paid = Rational::zero();
    for (idx, w) in solved.delta_by_constraint.iter().enumerate() {
        if !w.is_zero() {
            let c = &rule.constraints[idx];
            *delta
                .entry(Pair::new(c.x, c.y))
                .or_insert_with(Rational::zero) += w;
            paid += w * c.log_bound.bits();
        }
    }
    if paid != solved.objective {
        return Err(Error::Internal(format!(
            "dual degree weights pay {paid}, objective is {}",
            solved.objective
        )));
    }
    let sigma = solved
        .sigma
        .iter()
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    let mu = solved
        .mu
        .iter()
        .map(|(k, v)| (Pair::new(k.0, k.1), v.clone()))
        .collect();
    let ineq = FlowInequality::new(solved.n, lambda, delta, sigma, mu);
    if !verify_witness(&ineq) {
        return Err(Error::Internal("solver witness fails the inflow check".into()));
    }
    Ok(ineq)
}

/// The λ-reformulation weights of the maximin bound, with the re-solve
/// identity asserted: fixing the returned `λ` as a linear objective
/// reproduces the maximin optimum exactly.
pub fn compute_lambda(
    class: FunctionClass,
    rule: &DisjunctiveRule,
) -> Result<(Vec<(AttrSet, Rational)>, bool), Error> {
    validated(rule)?;
    let solved = solve_maximin(class, rule)?;
    let recheck = solve_fixed_lambda(class, rule, &solved.lambda)?;
    if recheck.objective != solved.objective {
        return Err(Error::Internal(format!(
            "λ re-solve mismatch: {} vs {}",
            recheck.objective, solved.objective
        )));
    }
    Ok((solved.lambda, solved.degenerate))
}

/// `max_{h ∈ class ∩ constraints} min_B h(B)` with a certified witness.
pub fn size_bound(class: FunctionClass, rule: &DisjunctiveRule) -> Result<SizeBound, Error> {
    validated(rule)?;
    let solved = solve_maximin(class, rule)?;
    let ineq = match class {
        // Only the polymatroid dual is a Shannon-flow witness; the modular
        // and subadditive duals certify their own LPs but not Γ_n.
        FunctionClass::Polymatroid => extract_witness(rule, &solved)?,
        _ => {
            let lambda = solved
                .lambda
                .iter()
                .filter(|(_, w)| !w.is_zero())
                .map(|(b, w)| (*b, w.clone()))
                .collect();
            let delta = solved
                .delta_by_constraint
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, w)| {
                    let c = &rule.constraints[i];
                    (Pair::new(c.x, c.y), w.clone())
                })
                .collect();
            FlowInequality::new(solved.n, lambda, delta, BTreeMap::new(), BTreeMap::new())
        }
    };
    Ok(SizeBound {
        class,
        objective: solved.objective.clone(),
        lambda: solved.lambda.clone(),
        delta_by_constraint: solved.delta_by_constraint.clone(),
        optimal_h: solved.h.clone(),
        degenerate: solved.degenerate,
        ineq,
    })
}

/// Bound report wrapper around [`size_bound`].
pub fn size_bound_report(class: FunctionClass, rule: &DisjunctiveRule) -> Result<BoundReport, Error> {
    let sb = size_bound(class, rule)?;
    Ok(BoundReport {
        kind: BoundKind::SizeBound,
        class: Some(class),
        log_value: LogQuantity(sb.objective.clone()),
        certificate: Certificate::FlowWitness {
            lambda: sb.lambda.clone(),
            ineq: sb.ineq.clone(),
        },
    })
}

/// Smallest cardinality log bound declared for each edge, by relation id.
fn edge_logs(rule: &DisjunctiveRule) -> BTreeMap<RelId, Rational> {
    let mut logs: BTreeMap<RelId, Rational> = BTreeMap::new();
    for c in &rule.constraints {
        if !c.is_cardinality() {
            continue;
        }
        for (support, id) in &rule.hypergraph.edges {
            let applies = match c.guard {
                Some(g) => g == *id && c.y == *support,
                None => c.y == *support,
            };
            if applies {
                let log = c.log_bound.bits().clone();
                logs.entry(*id)
                    .and_modify(|cur| {
                        if log < *cur {
                            *cur = log.clone();
                        }
                    })
                    .or_insert(log);
            }
        }
    }
    logs
}

/// The trivial vertex bound `n · log N`, `N` the largest declared relation
/// size.
pub fn vertex_bound(rule: &DisjunctiveRule) -> Result<BoundReport, Error> {
    let logs = edge_logs(rule);
    let log_n = logs
        .values()
        .max()
        .cloned()
        .ok_or_else(|| Error::Domain("vertex bound needs a cardinality constraint".into()))?;
    Ok(BoundReport {
        kind: BoundKind::Vertex,
        class: None,
        log_value: LogQuantity(log_n * rat_int(rule.n() as i64)),
        certificate: Certificate::Trivial,
    })
}

/// Minimum over 0/1 edge covers of the summed log sizes, by dynamic
/// programming over covered-variable masks. Weights above 1 never help, so
/// 0/1 covers suffice.
pub fn integral_edge_cover_bound(rule: &DisjunctiveRule) -> Result<BoundReport, Error> {
    if rule.hypergraph.edges.len() > 24 {
        return Err(Error::TooLarge("more than 24 edges".into()));
    }
    let logs = edge_logs(rule);
    let full = AttrSet::full(rule.n());
    let size = 1usize << rule.n();
    let mut cost: Vec<Option<Rational>> = vec![None; size];
    let mut choice: Vec<Option<(usize, usize)>> = vec![None; size]; // (prev mask, edge idx)
    cost[0] = Some(Rational::zero());
    // Relaxation over subset masks; each edge only grows the mask, so one
    // pass per edge count suffices.
    for _ in 0..rule.hypergraph.edges.len() {
        let mut changed = false;
        for mask in 0..size {
            let Some(base) = cost[mask].clone() else { continue };
            for (idx, (support, id)) in rule.hypergraph.edges.iter().enumerate() {
                let Some(log) = logs.get(id) else { continue };
                let next = mask | support.index();
                if next == mask {
                    continue;
                }
                let candidate = &base + log;
                if cost[next].as_ref().is_none_or(|cur| candidate < *cur) {
                    cost[next] = Some(candidate);
                    choice[next] = Some((mask, idx));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let total = cost[full.index()]
        .clone()
        .ok_or_else(|| Error::Domain("no cover: some variable has no sized edge".into()))?;
    let mut cover = Vec::new();
    let mut mask = full.index();
    while mask != 0 {
        let (prev, idx) = choice[mask].expect("path recorded");
        cover.push(rule.hypergraph.edges[idx].1);
        mask = prev;
    }
    cover.sort();
    cover.dedup();
    Ok(BoundReport {
        kind: BoundKind::IntegralEdgeCover,
        class: None,
        log_value: LogQuantity(total),
        certificate: Certificate::Cover(cover),
    })
}

/// The AGM bound: fractional edge cover optimum over the declared
/// cardinality constraints, computed as the modular-class size bound.
pub fn agm_bound(rule: &DisjunctiveRule) -> Result<BoundReport, Error> {
    let logs = edge_logs(rule);
    if logs.is_empty() {
        return Err(Error::Domain("AGM bound needs cardinality constraints".into()));
    }
    let cardinality_rule = DisjunctiveRule {
        hypergraph: rule.hypergraph.clone(),
        targets: vec![AttrSet::full(rule.n())],
        constraints: rule
            .constraints
            .iter()
            .filter(|c| c.is_cardinality())
            .cloned()
            .collect(),
    };
    validated(&cardinality_rule)?;
    let full = AttrSet::full(rule.n());
    let solved = solve_fixed_lambda(
        FunctionClass::Modular,
        &cardinality_rule,
        &[(full, Rational::from_integer(1.into()))],
    )
    .map_err(|e| match e {
        Error::DegenerateLp(_) => Error::Domain("uncovered variable".into()),
        other => other,
    })?;
    let mut weights = Vec::new();
    for (idx, w) in solved.delta_by_constraint.iter().enumerate() {
        if !w.is_zero() {
            let c = &cardinality_rule.constraints[idx];
            let id = c
                .guard
                .or_else(|| {
                    rule.hypergraph
                        .edges
                        .iter()
                        .find(|(s, _)| *s == c.y)
                        .map(|(_, id)| *id)
                })
                .expect("cardinality constraint has a guard edge");
            weights.push((id, w.clone()));
        }
    }
    Ok(BoundReport {
        kind: BoundKind::Agm,
        class: Some(FunctionClass::Modular),
        log_value: LogQuantity(solved.objective),
        certificate: Certificate::FractionalCover(weights),
    })
}

/// Re-verifies a report's certificate against its rule: covers cover,
/// witnesses satisfy the inflow conditions, and the paid objective matches
/// the reported value.
pub fn verify_report(rule: &DisjunctiveRule, report: &BoundReport) -> bool {
    match &report.certificate {
        Certificate::Trivial => true,
        Certificate::Cover(ids) => {
            let covered = ids.iter().fold(AttrSet::EMPTY, |acc, id| {
                acc.union(rule.hypergraph.support_of(*id).unwrap_or(AttrSet::EMPTY))
            });
            let logs = edge_logs(rule);
            let total: Rational = ids
                .iter()
                .filter_map(|id| logs.get(id).cloned())
                .sum();
            covered == AttrSet::full(rule.n()) && total == *report.log_value.bits()
        }
        Certificate::FractionalCover(weights) => {
            let logs = edge_logs(rule);
            let mut paid = Rational::zero();
            for (id, w) in weights {
                match logs.get(id) {
                    Some(log) => paid += w * log,
                    None => return false,
                }
            }
            if paid != *report.log_value.bits() {
                return false;
            }
            (0..rule.n()).all(|v| {
                let mass: Rational = weights
                    .iter()
                    .filter(|(id, _)| {
                        rule.hypergraph
                            .support_of(*id)
                            .is_some_and(|s| s.contains(v))
                    })
                    .map(|(_, w)| w.clone())
                    .sum();
                mass >= Rational::from_integer(1.into())
            })
        }
        Certificate::FlowWitness { lambda, ineq } => {
            if !verify_witness(ineq) {
                return false;
            }
            let inflow = ineq.inflow_all();
            lambda
                .iter()
                .all(|(b, w)| w.is_zero() || inflow[b.index()] >= *w)
        }
    }
}

/// The Zhang-Yeung polymatroid fixture: variables `A,B,X,Y,C` mapped to
/// indices `0..5`; closed sets with values 4/3/2/0, everything else by
/// minimal closed superset.
pub fn zy_fixture() -> SetFunction {
    let (a, b, x, y, c) = (0, 1, 2, 3, 4);
    fn s(vars: &[usize]) -> AttrSet {
        AttrSet::from_iter(vars.iter().copied())
    }
    SetFunction::from_closed_sets(
        5,
        &[
            (s(&[a, b, x, y, c]), 4),
            (s(&[a, x]), 3),
            (s(&[b, x]), 3),
            (s(&[x, y]), 3),
            (s(&[a, y]), 3),
            (s(&[b, y]), 3),
            (s(&[x]), 2),
            (s(&[a]), 2),
            (s(&[b]), 2),
            (s(&[y]), 2),
            (s(&[c]), 2),
            (AttrSet::EMPTY, 0),
        ],
    )
}

/// The Zhang-Yeung query at base size `N = 2^log_n`: body
/// `K(A,B,X,Y,C), R(X,Y), S(A,X), T(A,Y), U(B,X), V(B,Y), W(C)` with
/// `|R..V| ≤ N³`, `|W| ≤ N²`, no bound on `K`, and the keys of `K` as
/// functional dependencies.
pub fn zy_rule(log_n: u32) -> DisjunctiveRule {
    let (a, b, x, y, c) = (0, 1, 2, 3, 4);
    fn s(vars: &[usize]) -> AttrSet {
        AttrSet::from_iter(vars.iter().copied())
    }
    let all = s(&[a, b, x, y, c]);
    let supports = vec![
        all,       // K
        s(&[x, y]), // R
        s(&[a, x]), // S
        s(&[a, y]), // T
        s(&[b, x]), // U
        s(&[b, y]), // V
        s(&[c]),    // W
    ];
    let h = Hypergraph::new(5, supports);
    let n3 = 1u64 << (3 * log_n);
    let n2 = 1u64 << (2 * log_n);
    let mut constraints = Vec::new();
    for (i, sz) in [(1usize, n3), (2, n3), (3, n3), (4, n3), (5, n3), (6, n2)] {
        let (support, rel) = h.edges[i];
        constraints.push(DegreeConstraint::cardinality(support, sz, Some(rel)).unwrap());
    }
    let k_id = h.edges[0].1;
    for key in [
        s(&[a, b]),
        s(&[a, x, y]),
        s(&[b, x, y]),
        s(&[a, c]),
        s(&[x, c]),
        s(&[y, c]),
    ] {
        constraints.push(DegreeConstraint::from_count(key, all, 1, Some(k_id)).unwrap());
    }
    DisjunctiveRule::full_query(h, constraints)
}

/// The eight-variable polymatroid fixture from the disjunctive-rule gap
/// construction: two Zhang-Yeung-style blocks `A,B,X,Y` and `A',B',X',Y'`
/// sharing only the top set.
pub fn gap_fixture() -> SetFunction {
    fn s(vars: &[usize]) -> AttrSet {
        AttrSet::from_iter(vars.iter().copied())
    }
    let mut closed: Vec<(AttrSet, i64)> = vec![(AttrSet::full(8), 4), (AttrSet::EMPTY, 0)];
    for block in [0usize, 4] {
        let (a, b, x, y) = (block, block + 1, block + 2, block + 3);
        closed.extend([
            (s(&[a, x]), 3),
            (s(&[b, x]), 3),
            (s(&[x, y]), 3),
            (s(&[a, y]), 3),
            (s(&[b, y]), 3),
            (s(&[x]), 2),
            (s(&[a]), 2),
            (s(&[b]), 2),
            (s(&[y]), 2),
        ]);
    }
    SetFunction::from_closed_sets(8, &closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn c4_rule(size: u64) -> DisjunctiveRule {
        let edges = vec![
            AttrSet::from_iter([0, 1]),
            AttrSet::from_iter([1, 2]),
            AttrSet::from_iter([2, 3]),
            AttrSet::from_iter([3, 0]),
        ];
        let h = Hypergraph::new(4, edges);
        let constraints = h
            .edges
            .iter()
            .map(|(s, id)| DegreeConstraint::cardinality(*s, size, Some(*id)).unwrap())
            .collect();
        DisjunctiveRule::full_query(h, constraints)
    }

    fn triangle_rule(size: u64) -> DisjunctiveRule {
        let edges = vec![
            AttrSet::from_iter([0, 1]),
            AttrSet::from_iter([1, 2]),
            AttrSet::from_iter([2, 0]),
        ];
        let h = Hypergraph::new(3, edges);
        let constraints = h
            .edges
            .iter()
            .map(|(s, id)| DegreeConstraint::cardinality(*s, size, Some(*id)).unwrap())
            .collect();
        DisjunctiveRule::full_query(h, constraints)
    }

    #[test]
    fn vertex_bound_values() {
        let report = vertex_bound(&c4_rule(2)).unwrap();
        assert_eq!(*report.log_value.bits(), rat_int(4));
        let report = vertex_bound(&c4_rule(1 << 16)).unwrap();
        assert_eq!(*report.log_value.bits(), rat_int(64));
    }

    #[test]
    fn integral_cover_values() {
        let report = integral_edge_cover_bound(&c4_rule(2)).unwrap();
        assert_eq!(*report.log_value.bits(), rat_int(2));
        assert!(verify_report(&c4_rule(2), &report));
        if let Certificate::Cover(ids) = &report.certificate {
            assert_eq!(ids.len(), 2);
        } else {
            panic!("expected a cover certificate");
        }
        let report = integral_edge_cover_bound(&triangle_rule(2)).unwrap();
        assert_eq!(*report.log_value.bits(), rat_int(2));

        // A single edge covering everything: its own log size.
        let h = Hypergraph::new(3, vec![AttrSet::full(3)]);
        let c =
            vec![DegreeConstraint::cardinality(AttrSet::full(3), 16, Some(h.edges[0].1)).unwrap()];
        let rule = DisjunctiveRule::full_query(h, c);
        let report = integral_edge_cover_bound(&rule).unwrap();
        assert_eq!(*report.log_value.bits(), rat_int(4));
    }

    #[test]
    fn agm_values() {
        let report = agm_bound(&triangle_rule(2)).unwrap();
        assert_eq!(*report.log_value.bits(), rat(3, 2));
        assert!(verify_report(&triangle_rule(2), &report));

        let report = agm_bound(&c4_rule(2)).unwrap();
        assert_eq!(*report.log_value.bits(), rat_int(2));

        let h = Hypergraph::new(3, vec![AttrSet::full(3)]);
        let c =
            vec![DegreeConstraint::cardinality(AttrSet::full(3), 16, Some(h.edges[0].1)).unwrap()];
        let rule = DisjunctiveRule::full_query(h, c);
        assert_eq!(*agm_bound(&rule).unwrap().log_value.bits(), rat_int(4));
    }

    #[test]
    fn bound_chain_on_c4() {
        let rule = c4_rule(8);
        let vb = vertex_bound(&rule).unwrap();
        let iec = integral_edge_cover_bound(&rule).unwrap();
        let agm = agm_bound(&rule).unwrap();
        assert!(vb.log_value.bits() >= iec.log_value.bits());
        assert!(iec.log_value.bits() >= agm.log_value.bits());
    }

    #[test]
    fn size_bound_c4_with_degree_logs() {
        // Degree logs d on (A1, A1A2) and (A2, A1A2) give 3/2 + d.
        for d in [rat_int(0), rat(1, 4), rat(1, 2)] {
            let mut rule = c4_rule(2);
            let r12 = rule.hypergraph.edges[0].1;
            rule.constraints.push(
                DegreeConstraint::from_log(
                    AttrSet::singleton(0),
                    AttrSet::from_iter([0, 1]),
                    d.clone(),
                    Some(r12),
                )
                .unwrap(),
            );
            rule.constraints.push(
                DegreeConstraint::from_log(
                    AttrSet::singleton(1),
                    AttrSet::from_iter([0, 1]),
                    d.clone(),
                    Some(r12),
                )
                .unwrap(),
            );
            let sb = size_bound(FunctionClass::Polymatroid, &rule).unwrap();
            assert_eq!(sb.objective, rat(3, 2) + &d);
        }
    }

    #[test]
    fn zy_fixture_is_a_feasible_polymatroid_at_four() {
        let f = zy_fixture();
        let rule = zy_rule(1);
        let flags = classify_set_function(&f, &rule.constraints);
        assert!(flags.submodular);
        assert!(flags.monotone);
        assert!(flags.satisfies_constraints);
        assert!(!flags.modular);
        assert_eq!(*f.value(AttrSet::full(5)), rat_int(4));
    }

    #[test]
    fn zy_bound_is_at_least_four() {
        let rule = zy_rule(1);
        let sb = size_bound(FunctionClass::Polymatroid, &rule).unwrap();
        assert!(sb.objective >= rat_int(4), "got {}", sb.objective);
    }

    #[test]
    fn gap_fixture_is_a_polymatroid() {
        let f = gap_fixture();
        let flags = classify_set_function(&f, &[]);
        assert!(flags.submodular);
        assert!(flags.monotone);
        assert_eq!(*f.value(AttrSet::full(8)), rat_int(4));
    }

    #[test]
    fn classify_examples() {
        // f(Z) = |Z| is modular, submodular, monotone.
        let card = SetFunction::new(
            3,
            (0..8u32)
                .map(|z| rat_int(z.count_ones() as i64))
                .collect(),
        );
        let flags = classify_set_function(&card, &[]);
        assert!(flags.modular && flags.submodular && flags.monotone && flags.subadditive);

        // A constructed subadditivity violation: f({0,1}) > f({0}) + f({1}).
        let mut vals = vec![rat_int(0); 4];
        vals[0b01] = rat_int(1);
        vals[0b10] = rat_int(1);
        vals[0b11] = rat_int(3);
        let f = SetFunction::new(2, vals);
        let flags = classify_set_function(&f, &[]);
        assert!(!flags.subadditive);
        assert!(!flags.submodular);
    }

    #[test]
    fn compute_lambda_on_single_target() {
        let rule = triangle_rule(2);
        let (lambda, degenerate) = compute_lambda(FunctionClass::Polymatroid, &rule).unwrap();
        assert!(!degenerate);
        assert_eq!(lambda, vec![(AttrSet::full(3), rat_int(1))]);
    }
}
