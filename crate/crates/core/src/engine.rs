//! End-to-end evaluation strategies: worst-case-optimal full evaluation,
//! per-bag fractional-hypertree-width evaluation, and the adaptive
//! submodular-width strategy, plus the baseline/oracle algorithms they are
//! checked against.

use crate::attrset::AttrSet;
use crate::bounds::size_bound;
use crate::error::Error;
use crate::panda::{panda_run, panda_run_with_bound, PandaOptions, RunReport};
use crate::relalg::{brute_force_join, join, semijoin, Database, Model, Relation};
use crate::rule::{DisjunctiveRule, FunctionClass};
use crate::widths::{
    associated_td, bag_selector_images, da_minimax_width, enumerate_tds, TreeDecomposition,
};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Yannakakis evaluation over a join tree: two semijoin passes, then a
/// bottom-up join (full mode) or a root non-emptiness test (boolean mode,
/// decided right after the upward pass).
pub enum YannakakisResult {
    Boolean(bool),
    Full(Relation),
}

pub fn yannakakis(
    td: &TreeDecomposition,
    bag_tables: &BTreeMap<AttrSet, Relation>,
    boolean: bool,
) -> Result<YannakakisResult, Error> {
    let mut tables: Vec<Relation> = Vec::with_capacity(td.bags.len());
    for bag in &td.bags {
        let t = bag_tables
            .get(bag)
            .ok_or_else(|| Error::Domain(format!("no table for bag {bag}")))?;
        if t.attrs() != *bag {
            return Err(Error::Domain(format!(
                "table schema {} does not match bag {bag}",
                t.attrs()
            )));
        }
        tables.push(t.clone());
    }
    // Orientation: parent pointers from a BFS at bag 0.
    let n = td.bags.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &td.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0usize]);
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    // Upward pass (leaves to root).
    for &u in order.iter().rev() {
        if parent[u] != usize::MAX {
            let p = parent[u];
            tables[p] = semijoin(&tables[p], &tables[u]);
        }
    }
    if boolean {
        return Ok(YannakakisResult::Boolean(!tables[0].is_empty()));
    }
    // Downward pass (root to leaves).
    for &u in &order {
        if parent[u] != usize::MAX {
            tables[u] = semijoin(&tables[u], &tables[parent[u]]);
        }
    }
    // Bottom-up join along the tree order.
    let mut result = tables[order[0]].clone();
    for &u in order.iter().skip(1) {
        result = join(&result, &tables[u]);
    }
    Ok(YannakakisResult::Full(result))
}

fn body_relations<'a>(rule: &DisjunctiveRule, data: &'a Database) -> Result<Vec<&'a Relation>, Error> {
    rule.hypergraph
        .edges
        .iter()
        .map(|(_, id)| {
            data.get(id)
                .ok_or_else(|| Error::Domain(format!("missing data for {id}")))
        })
        .collect()
}

/// Worst-case-optimal evaluation of a full conjunctive query: one PANDA
/// run with the single target `[n]`, then a semijoin-reduction pass with
/// every input relation to drop spurious tuples.
pub fn eval_full_wco(rule: &DisjunctiveRule, data: &Database) -> Result<Relation, Error> {
    let full = AttrSet::full(rule.n());
    if rule.targets != vec![full] {
        return Err(Error::Domain("full evaluation needs the single target [n]".into()));
    }
    let report = panda_run(rule, data, PandaOptions::default())?;
    let mut table = report.model[&full].clone();
    for rel in body_relations(rule, data)? {
        table = semijoin(&table, rel);
    }
    Ok(table)
}

/// Boolean evaluation through the minimax-width-optimal tree
/// decomposition: one PANDA run per bag, semijoin reduction, then the
/// acyclic phase.
pub fn eval_boolean_fhtw(rule: &DisjunctiveRule, data: &Database) -> Result<bool, Error> {
    let (_, td) = da_minimax_width(rule, FunctionClass::Polymatroid)?;
    let rels = body_relations(rule, data)?;
    let mut bag_tables = BTreeMap::new();
    for bag in &td.bags {
        let bag_rule = rule.with_targets(vec![*bag]);
        let report = panda_run(&bag_rule, data, PandaOptions::default())?;
        let mut table = report.model[bag].clone();
        for rel in &rels {
            table = semijoin(&table, rel);
        }
        bag_tables.insert(*bag, table);
    }
    match yannakakis(&td, &bag_tables, true)? {
        YannakakisResult::Boolean(b) => Ok(b),
        YannakakisResult::Full(_) => unreachable!(),
    }
}

/// Instrumentation from a submodular-width evaluation.
#[derive(Clone, Debug, Default)]
pub struct SubwStats {
    /// Largest intermediate across the per-image PANDA runs.
    pub max_intermediate: u64,
    /// Largest reduced bag table fed into the acyclic phase.
    pub max_bag_table: u64,
    pub images: usize,
    pub tuples_checked: usize,
}

/// Boolean evaluation at the submodular width: one disjunctive PANDA run
/// per selector image, per-target unions across images, semijoin
/// reduction, then one acyclic run per image tuple with the associated
/// decomposition, OR-ed together.
pub fn eval_boolean_subw(rule: &DisjunctiveRule, data: &Database) -> Result<bool, Error> {
    let (verdict, _) = eval_boolean_subw_instrumented(rule, data)?;
    Ok(verdict)
}

pub fn eval_boolean_subw_instrumented(
    rule: &DisjunctiveRule,
    data: &Database,
) -> Result<(bool, SubwStats), Error> {
    if rule.n() > 8 {
        return Err(Error::TooLarge("submodular-width evaluation supports n <= 8".into()));
    }
    let tds = enumerate_tds(&rule.hypergraph)?;
    let images = bag_selector_images(&tds)?;
    let mut stats = SubwStats {
        images: images.len(),
        ..SubwStats::default()
    };
    let rels = body_relations(rule, data)?;

    // One PANDA run per image; union tables per target across images.
    let mut tables: BTreeMap<AttrSet, Relation> = BTreeMap::new();
    for image in &images {
        let image_rule = rule.with_targets(image.clone());
        let sb = size_bound(FunctionClass::Polymatroid, &image_rule)?;
        let report: RunReport =
            panda_run_with_bound(&image_rule, data, &sb, PandaOptions::default())?;
        stats.max_intermediate = stats.max_intermediate.max(report.max_intermediate);
        for (b, t) in report.model {
            match tables.get_mut(&b) {
                None => {
                    tables.insert(b, t);
                }
                Some(existing) => {
                    *existing = Relation::new(
                        existing.schema().to_vec(),
                        existing.tuples().cloned().chain(t.tuples().cloned()),
                    )?;
                }
            }
        }
    }
    // Semijoin-reduce every table with every input relation.
    for table in tables.values_mut() {
        for rel in &rels {
            *table = semijoin(table, rel);
        }
        stats.max_bag_table = stats.max_bag_table.max(table.len() as u64);
    }

    // For each tuple of image choices, run the acyclic phase on the
    // associated decomposition; the query is true iff some tuple says so.
    let mut choice = vec![0usize; images.len()];
    loop {
        stats.tuples_checked += 1;
        let chosen: Vec<AttrSet> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| images[i][c])
            .collect();
        let td = associated_td(&tds, &chosen).ok_or_else(|| {
            Error::Internal("no associated decomposition for an image tuple".into())
        })?;
        let mut bag_tables = BTreeMap::new();
        for bag in &td.bags {
            bag_tables.insert(*bag, tables[bag].clone());
        }
        if let YannakakisResult::Boolean(true) = yannakakis(td, &bag_tables, true)? {
            return Ok((true, stats));
        }
        let mut k = 0;
        loop {
            if k == images.len() {
                return Ok((false, stats));
            }
            choice[k] += 1;
            if choice[k] < images[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Greedy baseline model: scan the body join; a tuple already covered by
/// any target table is skipped, otherwise its projection is added to every
/// target table. All tables end up the same size.
pub fn greedy_model(rule: &DisjunctiveRule, data: &Database) -> Result<Model, Error> {
    let rels = body_relations(rule, data)?;
    let body = brute_force_join(&rels);
    let mut model: Model = rule
        .targets
        .iter()
        .map(|b| (*b, Relation::empty(b.iter().collect())))
        .collect();
    let mut keep: Vec<Vec<Vec<u32>>> = vec![Vec::new(); rule.targets.len()];
    let mut seen: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); rule.targets.len()];
    let positions: Vec<Vec<usize>> = rule
        .targets
        .iter()
        .map(|b| {
            body.schema()
                .iter()
                .enumerate()
                .filter(|(_, v)| b.contains(**v))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    for t in body.tuples() {
        let projections: Vec<Vec<u32>> = positions
            .iter()
            .map(|pos| pos.iter().map(|&i| t[i]).collect())
            .collect();
        let covered = projections
            .iter()
            .enumerate()
            .any(|(k, p)| seen[k].contains(p));
        if !covered {
            for (k, p) in projections.into_iter().enumerate() {
                if seen[k].insert(p.clone()) {
                    keep[k].push(p);
                }
            }
        }
    }
    for (k, b) in rule.targets.iter().enumerate() {
        model.insert(
            *b,
            Relation::new(b.iter().collect(), keep[k].drain(..))?,
        );
    }
    Ok(model)
}

/// Exact minimum model size by exhaustive covering search; tiny instances
/// only (body join of at most 20 tuples).
pub fn brute_min_model(rule: &DisjunctiveRule, data: &Database) -> Result<u64, Error> {
    let rels = body_relations(rule, data)?;
    let body = brute_force_join(&rels);
    if body.len() > 20 {
        return Err(Error::TooLarge(format!(
            "brute-force model search capped at 20 join tuples, got {}",
            body.len()
        )));
    }
    if body.is_empty() {
        return Ok(0);
    }
    let positions: Vec<Vec<usize>> = rule
        .targets
        .iter()
        .map(|b| {
            body.schema()
                .iter()
                .enumerate()
                .filter(|(_, v)| b.contains(**v))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let tuples: Vec<Vec<Vec<u32>>> = body
        .tuples()
        .map(|t| {
            positions
                .iter()
                .map(|pos| pos.iter().map(|&i| t[i]).collect())
                .collect()
        })
        .collect();

    // Branch and bound over per-tuple target choices.
    fn search(
        tuples: &[Vec<Vec<u32>>],
        idx: usize,
        tables: &mut Vec<BTreeSet<Vec<u32>>>,
        best: &mut u64,
    ) {
        let current_max = tables.iter().map(|t| t.len() as u64).max().unwrap_or(0);
        if current_max >= *best {
            return;
        }
        if idx == tuples.len() {
            *best = current_max;
            return;
        }
        // Prefer targets where the projection is already present.
        if let Some(k) = (0..tables.len()).find(|&k| tables[k].contains(&tuples[idx][k])) {
            let _ = k;
            search(tuples, idx + 1, tables, best);
            return;
        }
        for k in 0..tables.len() {
            tables[k].insert(tuples[idx][k].clone());
            search(tuples, idx + 1, tables, best);
            tables[k].remove(&tuples[idx][k]);
        }
    }
    let mut tables = vec![BTreeSet::new(); rule.targets.len()];
    let mut best = u64::MAX;
    search(&tuples, 0, &mut tables, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relalg::is_model_of;
    use crate::rule::{DegreeConstraint, Hypergraph, RelId};
    use crate::widths::WidthKind;

    fn s(vars: &[usize]) -> AttrSet {
        AttrSet::from_iter(vars.iter().copied())
    }

    fn c4_rule(size: u64) -> DisjunctiveRule {
        let h = Hypergraph::new(
            4,
            vec![s(&[0, 1]), s(&[1, 2]), s(&[2, 3]), s(&[3, 0])],
        );
        let constraints = h
            .edges
            .iter()
            .map(|(sup, id)| DegreeConstraint::cardinality(*sup, size, Some(*id)).unwrap())
            .collect();
        DisjunctiveRule::full_query(h, constraints)
    }

    /// c4-skew: R12 = R34 = [N]×[1], R23 = R41 = [1]×[N].
    fn c4_skew(n: u32) -> Database {
        let mut d = BTreeMap::new();
        d.insert(RelId(0), Relation::new(vec![0, 1], (0..n).map(|i| vec![i, 0])).unwrap());
        d.insert(RelId(1), Relation::new(vec![1, 2], (0..n).map(|j| vec![0, j])).unwrap());
        d.insert(RelId(2), Relation::new(vec![2, 3], (0..n).map(|j| vec![j, 0])).unwrap());
        d.insert(RelId(3), Relation::new(vec![3, 0], (0..n).map(|i| vec![0, i])).unwrap());
        d
    }

    /// c4-diag: R12 = {(i,i)}, the rest full K×K grids.
    fn c4_diag(k: u32) -> Database {
        let grid = |a: usize, b: usize| {
            Relation::new(
                vec![a, b],
                (0..k).flat_map(|x| (0..k).map(move |y| vec![x, y])),
            )
            .unwrap()
        };
        let mut d = BTreeMap::new();
        d.insert(RelId(0), Relation::new(vec![0, 1], (0..k).map(|i| vec![i, i])).unwrap());
        d.insert(RelId(1), grid(1, 2));
        d.insert(RelId(2), grid(2, 3));
        d.insert(RelId(3), grid(3, 0));
        d
    }

    #[test]
    fn wco_matches_oracle_on_diag() {
        let k = 3u32;
        let rule = c4_rule((k * k) as u64);
        let data = c4_diag(k);
        let out = eval_full_wco(&rule, &data).unwrap();
        let rels: Vec<&Relation> = rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        assert_eq!(out, brute_force_join(&rels));
        assert_eq!(out.len(), 27);
    }

    #[test]
    fn wco_empty_input() {
        let rule = c4_rule(4);
        let mut data = c4_skew(4);
        data.insert(RelId(2), Relation::empty(vec![2, 3]));
        assert!(eval_full_wco(&rule, &data).unwrap().is_empty());
    }

    #[test]
    fn yannakakis_two_bag_path() {
        let h = Hypergraph::new(3, vec![s(&[0, 1]), s(&[1, 2])]);
        let (_, td) = crate::widths::classic_width(&h, WidthKind::Treewidth).unwrap();
        let t01 = Relation::new(vec![0, 1], vec![vec![1, 5], vec![2, 6]]).unwrap();
        let t12 = Relation::new(vec![1, 2], vec![vec![5, 9], vec![7, 9]]).unwrap();
        let mut bags = BTreeMap::new();
        bags.insert(s(&[0, 1]), t01.clone());
        bags.insert(s(&[1, 2]), t12.clone());
        match yannakakis(&td, &bags, false).unwrap() {
            YannakakisResult::Full(rel) => {
                assert_eq!(rel, join(&t01, &t12));
                assert_eq!(rel.len(), 1);
            }
            _ => panic!(),
        }
        match yannakakis(&td, &bags, true).unwrap() {
            YannakakisResult::Boolean(b) => assert!(b),
            _ => panic!(),
        }
        bags.insert(s(&[1, 2]), Relation::empty(vec![1, 2]));
        match yannakakis(&td, &bags, true).unwrap() {
            YannakakisResult::Boolean(b) => assert!(!b),
            _ => panic!(),
        }
    }

    #[test]
    fn boolean_strategies_on_c4() {
        let k = 3u32;
        let rule = c4_rule((k * k) as u64);
        let data = c4_diag(k);
        assert!(eval_boolean_fhtw(&rule, &data).unwrap());
        assert!(eval_boolean_subw(&rule, &data).unwrap());

        // Incompatible domains between R12 and R23 give an empty join.
        let mut dead = c4_diag(k);
        dead.insert(
            RelId(1),
            Relation::new(vec![1, 2], (0..k).map(|j| vec![100 + j, j])).unwrap(),
        );
        assert!(!eval_boolean_fhtw(&rule, &dead).unwrap());
        assert!(!eval_boolean_subw(&rule, &dead).unwrap());
    }

    #[test]
    fn greedy_model_covers_and_respects_bound() {
        let n = 16u32;
        let edges = vec![s(&[0, 1]), s(&[1, 2]), s(&[2, 3])];
        let h = Hypergraph::new(4, edges);
        let constraints = h
            .edges
            .iter()
            .map(|(sup, id)| DegreeConstraint::cardinality(*sup, n as u64, Some(*id)).unwrap())
            .collect();
        let rule = DisjunctiveRule {
            hypergraph: h,
            targets: vec![s(&[0, 1, 2]), s(&[1, 2, 3])],
            constraints,
        };
        let mut data = BTreeMap::new();
        data.insert(RelId(0), Relation::new(vec![0, 1], (0..n).map(|i| vec![i, 0])).unwrap());
        data.insert(RelId(1), Relation::new(vec![1, 2], (0..n).map(|j| vec![0, j])).unwrap());
        data.insert(RelId(2), Relation::new(vec![2, 3], (0..n).map(|j| vec![j, 0])).unwrap());

        let model = greedy_model(&rule, &data).unwrap();
        let rels: Vec<&Relation> = rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        let body = brute_force_join(&rels);
        assert!(is_model_of(&model, &body, &rule.targets));
        // All tables have the same size by construction, within N^{3/2}.
        let sizes: Vec<usize> = model.values().map(|t| t.len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]));
        assert!(sizes[0] as u64 <= 64);
    }

    #[test]
    fn brute_min_model_examples() {
        // Empty join.
        let rule = c4_rule(4);
        let mut data = c4_skew(2);
        data.insert(RelId(0), Relation::empty(vec![0, 1]));
        assert_eq!(brute_min_model(&rule, &data).unwrap(), 0);

        // One join tuple, two targets: minimum 1.
        let edges = vec![s(&[0, 1]), s(&[1, 2])];
        let h = Hypergraph::new(3, edges);
        let constraints = h
            .edges
            .iter()
            .map(|(sup, id)| DegreeConstraint::cardinality(*sup, 2, Some(*id)).unwrap())
            .collect();
        let rule = DisjunctiveRule {
            hypergraph: h,
            targets: vec![s(&[0, 1]), s(&[1, 2])],
            constraints,
        };
        let mut data = BTreeMap::new();
        data.insert(RelId(0), Relation::new(vec![0, 1], vec![vec![1, 2]]).unwrap());
        data.insert(RelId(1), Relation::new(vec![1, 2], vec![vec![2, 3]]).unwrap());
        assert_eq!(brute_min_model(&rule, &data).unwrap(), 1);

        // Four join tuples sharing projections: (a, b) for a,b in {0,1}
        // via body R0(A), R1(B); targets {A} and {B}: one target table of
        // size 2 suffices... the optimum is 2.
        let h = Hypergraph::new(2, vec![s(&[0]), s(&[1])]);
        let constraints = h
            .edges
            .iter()
            .map(|(sup, id)| DegreeConstraint::cardinality(*sup, 2, Some(*id)).unwrap())
            .collect();
        let rule = DisjunctiveRule {
            hypergraph: h,
            targets: vec![s(&[0]), s(&[1])],
            constraints,
        };
        let mut data = BTreeMap::new();
        data.insert(RelId(0), Relation::new(vec![0], vec![vec![0], vec![1]]).unwrap());
        data.insert(RelId(1), Relation::new(vec![1], vec![vec![0], vec![1]]).unwrap());
        // Exhaustive check: covering all 4 pairs needs max table size 2
        // and 2 is achievable (put both values in one target).
        assert_eq!(brute_min_model(&rule, &data).unwrap(), 2);
    }
}
