//! Tree decompositions and the width hierarchy: treewidth, generalized and
//! fractional hypertree width, and the degree-aware minimax/maximin widths
//! computed through the bound LPs.

use crate::attrset::AttrSet;
use crate::bounds::{size_bound, SizeBound};
use crate::error::Error;
use crate::rational::{rat_int, Rational};
use crate::ratlp::{simplex_solve, LinearProgram, LpStatus, Sense};
use crate::rule::{DisjunctiveRule, FunctionClass, Hypergraph};
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// A tree decomposition: bags plus tree edges between bag indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeDecomposition {
    pub bags: Vec<AttrSet>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn bag_set(&self) -> Vec<AttrSet> {
        let mut b = self.bags.clone();
        b.sort();
        b
    }
}

/// Checks the two tree-decomposition conditions: every hyperedge inside
/// some bag, and every variable's bag set connected in the tree.
pub fn validate_td(h: &Hypergraph, td: &TreeDecomposition) -> bool {
    if td.bags.is_empty() || td.edges.len() + 1 != td.bags.len() {
        return false;
    }
    // Tree connectivity.
    let mut adj = vec![Vec::new(); td.bags.len()];
    for &(a, b) in &td.edges {
        if a >= td.bags.len() || b >= td.bags.len() {
            return false;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; td.bags.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return false;
    }
    // Edge coverage.
    for (support, _) in &h.edges {
        if !td.bags.iter().any(|b| support.is_subset(*b)) {
            return false;
        }
    }
    // Per-variable connectedness.
    for v in 0..h.n {
        let holders: Vec<usize> = (0..td.bags.len())
            .filter(|i| td.bags[*i].contains(v))
            .collect();
        if holders.is_empty() {
            return false;
        }
        let inset: BTreeSet<usize> = holders.iter().copied().collect();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([holders[0]]);
        seen.insert(holders[0]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if inset.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != holders.len() {
            return false;
        }
    }
    true
}

/// Bags produced by eliminating variables in the given order: eliminating
/// `v` merges all edges incident to `v` into a bag and replaces them with
/// the bag minus `v`.
fn elimination_bags(h: &Hypergraph, order: &[usize]) -> Vec<AttrSet> {
    let mut edges: Vec<AttrSet> = h.edges.iter().map(|(s, _)| *s).collect();
    let mut bags = Vec::new();
    for &v in order {
        let mut union = AttrSet::singleton(v);
        let mut rest = Vec::new();
        for e in edges.drain(..) {
            if e.contains(v) {
                union = union.union(e);
            } else {
                rest.push(e);
            }
        }
        bags.push(union);
        edges = rest;
        let reduced = union.remove(v);
        if !reduced.is_empty() {
            edges.push(reduced);
        }
    }
    bags
}

/// Drops bags contained in other bags, then connects the rest by a
/// maximum-intersection spanning tree (which is a junction tree whenever
/// one exists).
fn assemble_td(mut bags: Vec<AttrSet>) -> TreeDecomposition {
    bags.sort();
    bags.dedup();
    let maximal: Vec<AttrSet> = bags
        .iter()
        .filter(|b| !bags.iter().any(|o| o != *b && b.is_subset(*o)))
        .copied()
        .collect();
    let k = maximal.len();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new(); // (weight, i, j)
    for i in 0..k {
        for j in (i + 1)..k {
            pairs.push((maximal[i].intersect(maximal[j]).len(), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut edges = Vec::new();
    for (_, i, j) in pairs {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            edges.push((i, j));
        }
    }
    TreeDecomposition {
        bags: maximal,
        edges,
    }
}

fn permutations(n: usize) -> Permutations {
    Permutations {
        items: (0..n).collect(),
        first: true,
    }
}

/// Lexicographic permutation stream over `0..n`.
struct Permutations {
    items: Vec<usize>,
    first: bool,
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.first {
            self.first = false;
            return Some(self.items.clone());
        }
        let n = self.items.len();
        if n < 2 {
            return None;
        }
        let mut i = n - 1;
        while i > 0 && self.items[i - 1] >= self.items[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while self.items[j] <= self.items[i - 1] {
            j -= 1;
        }
        self.items.swap(i - 1, j);
        self.items[i..].reverse();
        Some(self.items.clone())
    }
}

/// Enumerates the non-redundant, mutually non-dominated tree
/// decompositions: one elimination run per variable ordering, bag-set
/// deduplication, then a domination filter that keeps the minimal
/// decompositions (a decomposition is dropped when another one fits inside
/// it bag-by-bag).
pub fn enumerate_tds(h: &Hypergraph) -> Result<Vec<TreeDecomposition>, Error> {
    if h.n == 0 || h.n > 10 {
        return Err(Error::TooLarge(format!(
            "tree-decomposition enumeration supports 1..=10 variables, got {}",
            h.n
        )));
    }
    let mut by_bagset: BTreeMap<Vec<AttrSet>, TreeDecomposition> = BTreeMap::new();
    for order in permutations(h.n) {
        let td = assemble_td(elimination_bags(h, &order));
        by_bagset.entry(td.bag_set()).or_insert(td);
    }
    let candidates: Vec<TreeDecomposition> = by_bagset.into_values().collect();
    // fits(a, b): every bag of a is inside some bag of b.
    let fits = |a: &TreeDecomposition, b: &TreeDecomposition| {
        a.bags
            .iter()
            .all(|x| b.bags.iter().any(|y| x.is_subset(*y)))
    };
    let kept: Vec<TreeDecomposition> = candidates
        .iter()
        .filter(|td| {
            !candidates
                .iter()
                .any(|other| other.bag_set() != td.bag_set() && fits(other, td))
        })
        .cloned()
        .collect();
    for td in &kept {
        if !validate_td(h, td) {
            return Err(Error::Internal("enumerated an invalid tree decomposition".into()));
        }
    }
    Ok(kept)
}

/// Classic per-bag width kinds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WidthKind {
    Treewidth,
    GeneralizedHypertree,
    FractionalHypertree,
}

/// Integral edge cover number of the restriction of `h` to `bag`.
fn integral_cover_number(h: &Hypergraph, bag: AttrSet) -> Result<Rational, Error> {
    let goal = bag.index();
    let mut dist = vec![u32::MAX; goal + 1];
    dist[0] = 0;
    let masks: Vec<usize> = h
        .edges
        .iter()
        .map(|(s, _)| s.intersect(bag).index())
        .filter(|m| *m != 0)
        .collect();
    for mask in 0..=goal {
        if mask & goal != mask || dist[mask] == u32::MAX {
            continue;
        }
        for em in &masks {
            let next = (mask | em) & goal;
            if dist[next] > dist[mask] + 1 {
                dist[next] = dist[mask] + 1;
            }
        }
    }
    if dist[goal] == u32::MAX {
        return Err(Error::Domain(format!("bag {bag} is not coverable")));
    }
    Ok(rat_int(dist[goal] as i64))
}

/// Fractional edge cover number of the restriction of `h` to `bag`,
/// computed exactly via the packing dual `max Σ y_v` subject to
/// `Σ_{v ∈ F∩bag} y_v ≤ 1`.
fn fractional_cover_number(h: &Hypergraph, bag: AttrSet) -> Result<Rational, Error> {
    let vars: Vec<usize> = bag.iter().collect();
    let mut lp = LinearProgram::new(vars.len(), true);
    lp.objective = vars
        .iter()
        .enumerate()
        .map(|(i, _)| (i, Rational::one()))
        .collect();
    for (support, _) in &h.edges {
        let cut = support.intersect(bag);
        if cut.is_empty() {
            continue;
        }
        let coeffs = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| cut.contains(**v))
            .map(|(i, _)| (i, Rational::one()))
            .collect();
        lp.add_row(coeffs, Sense::Le, Rational::one());
    }
    let sol = simplex_solve(&lp);
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        _ => Err(Error::Domain(format!("bag {bag} is not fractionally coverable"))),
    }
}

/// Classic widths: min over enumerated decompositions of the max per-bag
/// cost (`|bag|-1`, integral cover number, or fractional cover number of
/// the restricted hypergraph).
pub fn classic_width(h: &Hypergraph, kind: WidthKind) -> Result<(Rational, TreeDecomposition), Error> {
    let tds = enumerate_tds(h)?;
    let mut best: Option<(Rational, TreeDecomposition)> = None;
    for td in tds {
        let mut worst = Rational::from_integer(0.into());
        for bag in &td.bags {
            let cost = match kind {
                WidthKind::Treewidth => rat_int(bag.len() as i64 - 1),
                WidthKind::GeneralizedHypertree => integral_cover_number(h, *bag)?,
                WidthKind::FractionalHypertree => fractional_cover_number(h, *bag)?,
            };
            if cost > worst {
                worst = cost;
            }
        }
        let replace = match &best {
            None => true,
            Some((w, _)) => worst < *w,
        };
        if replace {
            best = Some((worst, td));
        }
    }
    best.ok_or_else(|| Error::Internal("no tree decompositions".into()))
}

/// Degree-aware minimax width: min over decompositions of the max per-bag
/// single-target bound over the class. Bag bounds are memoized across
/// decompositions.
pub fn da_minimax_width(
    rule: &DisjunctiveRule,
    class: FunctionClass,
) -> Result<(Rational, TreeDecomposition), Error> {
    let tds = enumerate_tds(&rule.hypergraph)?;
    let mut bag_bound: BTreeMap<AttrSet, Rational> = BTreeMap::new();
    let mut best: Option<(Rational, TreeDecomposition)> = None;
    for td in tds {
        let mut worst = Rational::from_integer(0.into());
        for bag in &td.bags {
            let value = match bag_bound.get(bag) {
                Some(v) => v.clone(),
                None => {
                    let sb = size_bound(class, &rule.with_targets(vec![*bag]))?;
                    bag_bound.insert(*bag, sb.objective.clone());
                    sb.objective
                }
            };
            if value > worst {
                worst = value;
            }
        }
        let replace = match &best {
            None => true,
            Some((w, _)) => worst < *w,
        };
        if replace {
            best = Some((worst, td));
        }
    }
    best.ok_or_else(|| Error::Internal("no tree decompositions".into()))
}

/// All distinct bag-selector images over the given decompositions: sets of
/// bags obtained by picking one bag from each decomposition.
pub fn bag_selector_images(tds: &[TreeDecomposition]) -> Result<Vec<Vec<AttrSet>>, Error> {
    let mut product = 1usize;
    for td in tds {
        product = product.saturating_mul(td.bags.len());
        if product > 10_000 {
            return Err(Error::EnumerationBlowUp(
                "selector image enumeration exceeds 10^4 combinations".into(),
            ));
        }
    }
    let mut images: BTreeSet<Vec<AttrSet>> = BTreeSet::new();
    let mut choice = vec![0usize; tds.len()];
    loop {
        let mut image: Vec<AttrSet> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| tds[i].bags[c])
            .collect();
        image.sort();
        image.dedup();
        images.insert(image);
        // Advance the mixed-radix counter.
        let mut k = 0;
        loop {
            if k == tds.len() {
                return Ok(images.into_iter().collect());
            }
            choice[k] += 1;
            if choice[k] < tds[k].bags.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// A decomposition all of whose bags come from the given collection (the
/// companion of the selector-image machinery; one exists for every tuple
/// of image choices).
pub fn associated_td<'a>(
    tds: &'a [TreeDecomposition],
    chosen: &[AttrSet],
) -> Option<&'a TreeDecomposition> {
    let set: BTreeSet<AttrSet> = chosen.iter().copied().collect();
    tds.iter()
        .find(|td| td.bags.iter().all(|b| set.contains(b)))
}

/// Minimal transversals of the bag families: inclusion-minimal bag sets
/// hitting every decomposition. Every minimal transversal is a selector
/// image, and the maximin width is attained on one of them.
fn minimal_transversals(tds: &[TreeDecomposition]) -> Result<Vec<Vec<AttrSet>>, Error> {
    let families: Vec<Vec<AttrSet>> = tds.iter().map(|td| td.bag_set()).collect();
    let mut out: BTreeSet<Vec<AttrSet>> = BTreeSet::new();
    let mut nodes = 0usize;
    fn hit(family: &[AttrSet], chosen: &BTreeSet<AttrSet>) -> bool {
        family.iter().any(|b| chosen.contains(b))
    }
    fn recurse(
        families: &[Vec<AttrSet>],
        chosen: &mut BTreeSet<AttrSet>,
        out: &mut BTreeSet<Vec<AttrSet>>,
        nodes: &mut usize,
    ) -> Result<(), Error> {
        *nodes += 1;
        if *nodes > 1_000_000 {
            return Err(Error::EnumerationBlowUp(
                "transversal enumeration exceeded its node budget".into(),
            ));
        }
        match families.iter().find(|f| !hit(f, chosen)) {
            None => {
                // Transversal; keep only if every chosen bag is the unique
                // hitter of some family.
                let minimal = chosen.iter().all(|b| {
                    families
                        .iter()
                        .any(|f| f.contains(b) && f.iter().filter(|x| chosen.contains(*x)).count() == 1)
                });
                if minimal {
                    out.insert(chosen.iter().copied().collect());
                }
                Ok(())
            }
            Some(family) => {
                for b in family {
                    if chosen.insert(*b) {
                        recurse(families, chosen, out, nodes)?;
                        chosen.remove(b);
                    }
                }
                Ok(())
            }
        }
    }
    let mut chosen = BTreeSet::new();
    recurse(&families, &mut chosen, &mut out, &mut nodes)?;
    Ok(out.into_iter().collect())
}

/// Degree-aware maximin width: the maximum over selector images of the
/// multi-target size bound. The maximum is attained on a minimal
/// transversal (adding targets can only lower a min), so only those are
/// solved.
pub fn da_maximin_width(
    rule: &DisjunctiveRule,
    class: FunctionClass,
) -> Result<(Rational, Vec<AttrSet>, SizeBound), Error> {
    let tds = enumerate_tds(&rule.hypergraph)?;
    let transversals = minimal_transversals(&tds)?;
    let mut best: Option<(Rational, Vec<AttrSet>, SizeBound)> = None;
    for targets in transversals {
        let sb = size_bound(class, &rule.with_targets(targets.clone()))?;
        let replace = match &best {
            None => true,
            Some((v, _, _)) => sb.objective > *v,
        };
        if replace {
            best = Some((sb.objective.clone(), targets, sb));
        }
    }
    best.ok_or_else(|| Error::Internal("no selector images".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rule::DegreeConstraint;

    fn s(vars: &[usize]) -> AttrSet {
        AttrSet::from_iter(vars.iter().copied())
    }

    fn c4() -> Hypergraph {
        Hypergraph::new(
            4,
            vec![s(&[0, 1]), s(&[1, 2]), s(&[2, 3]), s(&[3, 0])],
        )
    }

    fn c4_rule(size: u64) -> DisjunctiveRule {
        let h = c4();
        let constraints = h
            .edges
            .iter()
            .map(|(sup, id)| DegreeConstraint::cardinality(*sup, size, Some(*id)).unwrap())
            .collect();
        DisjunctiveRule::full_query(h, constraints)
    }

    #[test]
    fn c4_has_exactly_two_decompositions() {
        let tds = enumerate_tds(&c4()).unwrap();
        assert_eq!(tds.len(), 2);
        let sets: Vec<Vec<AttrSet>> = tds.iter().map(|t| t.bag_set()).collect();
        assert!(sets.contains(&vec![s(&[0, 1, 2]), s(&[0, 2, 3])]));
        assert!(sets.contains(&vec![s(&[0, 1, 3]), s(&[1, 2, 3])]));
    }

    #[test]
    fn triangle_has_one_decomposition() {
        let h = Hypergraph::new(3, vec![s(&[0, 1]), s(&[1, 2]), s(&[2, 0])]);
        let tds = enumerate_tds(&h).unwrap();
        assert_eq!(tds.len(), 1);
        assert_eq!(tds[0].bags, vec![s(&[0, 1, 2])]);
    }

    #[test]
    fn path_keeps_the_two_bag_decomposition() {
        let h = Hypergraph::new(3, vec![s(&[0, 1]), s(&[1, 2])]);
        let tds = enumerate_tds(&h).unwrap();
        assert_eq!(tds.len(), 1);
        assert_eq!(tds[0].bag_set(), vec![s(&[0, 1]), s(&[1, 2])]);
    }

    #[test]
    fn classic_widths_of_c4() {
        let h = c4();
        let (tw, _) = classic_width(&h, WidthKind::Treewidth).unwrap();
        assert_eq!(tw, rat_int(2));
        let (fhtw, _) = classic_width(&h, WidthKind::FractionalHypertree).unwrap();
        assert_eq!(fhtw, rat_int(2));
        let (ghtw, _) = classic_width(&h, WidthKind::GeneralizedHypertree).unwrap();
        assert_eq!(ghtw, rat_int(2));
    }

    #[test]
    fn fhtw_of_triangle() {
        let h = Hypergraph::new(3, vec![s(&[0, 1]), s(&[1, 2]), s(&[2, 0])]);
        let (fhtw, _) = classic_width(&h, WidthKind::FractionalHypertree).unwrap();
        assert_eq!(fhtw, rat(3, 2));
    }

    #[test]
    fn da_widths_of_c4() {
        let rule = c4_rule(2); // unit logs
        let (minimax, _) = da_minimax_width(&rule, FunctionClass::Polymatroid).unwrap();
        assert_eq!(minimax, rat_int(2));
        let (maximin, targets, _) = da_maximin_width(&rule, FunctionClass::Polymatroid).unwrap();
        assert_eq!(maximin, rat(3, 2));
        assert_eq!(targets.len(), 2);
    }

    #[test]
    fn c4_selector_images_are_the_four_rules() {
        let tds = enumerate_tds(&c4()).unwrap();
        let images = bag_selector_images(&tds).unwrap();
        assert_eq!(images.len(), 4);
        for image in &images {
            assert_eq!(image.len(), 2);
        }
        // The associated decomposition of a same-tree tuple is that tree.
        let left = vec![s(&[0, 1, 2]), s(&[0, 2, 3])];
        let td = associated_td(&tds, &left).unwrap();
        assert_eq!(td.bag_set(), left);
    }

    #[test]
    fn single_td_images_are_single_bags() {
        let h = Hypergraph::new(3, vec![s(&[0, 1]), s(&[1, 2])]);
        let tds = enumerate_tds(&h).unwrap();
        let images = bag_selector_images(&tds).unwrap();
        assert_eq!(images, vec![vec![s(&[0, 1])], vec![s(&[1, 2])]]);
    }

    #[test]
    fn maximin_equals_minimax_with_one_td() {
        let h = Hypergraph::new(3, vec![s(&[0, 1]), s(&[1, 2])]);
        let constraints = h
            .edges
            .iter()
            .map(|(sup, id)| DegreeConstraint::cardinality(*sup, 4, Some(*id)).unwrap())
            .collect();
        let rule = DisjunctiveRule::full_query(h, constraints);
        let (minimax, _) = da_minimax_width(&rule, FunctionClass::Polymatroid).unwrap();
        let (maximin, _, _) = da_maximin_width(&rule, FunctionClass::Polymatroid).unwrap();
        assert_eq!(minimax, maximin);
    }

    #[test]
    fn c4_with_fds_lowers_minimax() {
        let mut rule = c4_rule(2);
        let r12 = rule.hypergraph.edges[0].1;
        rule.constraints
            .push(DegreeConstraint::from_count(s(&[0]), s(&[0, 1]), 1, Some(r12)).unwrap());
        rule.constraints
            .push(DegreeConstraint::from_count(s(&[1]), s(&[0, 1]), 1, Some(r12)).unwrap());
        let (minimax, _) = da_minimax_width(&rule, FunctionClass::Polymatroid).unwrap();
        assert!(minimax < rat_int(2));
    }
}
