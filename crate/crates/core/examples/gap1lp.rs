use pandaq_core::attrset::AttrSet;
use pandaq_core::bounds::size_bound;
use pandaq_core::rule::{DegreeConstraint, DisjunctiveRule, FunctionClass, Hypergraph};

fn gap1_rule(m: usize, k: usize) -> DisjunctiveRule {
    let blocks = 2 * k;
    let mut supports = Vec::new();
    for b in 0..blocks {
        let nb = (b + 1) % blocks;
        for i in 0..m {
            for j in 0..m {
                supports.push(AttrSet::from_iter([b * m + i, nb * m + j]));
            }
        }
    }
    let h = Hypergraph::new(blocks * m, supports);
    let constraints = h
        .edges
        .iter()
        .map(|(s, id)| DegreeConstraint::cardinality(*s, 2, Some(*id)).unwrap())
        .collect();
    DisjunctiveRule::full_query(h, constraints)
}

fn main() {
    let rule = gap1_rule(2, 2);
    // One representative selector-image pair.
    let targets = vec![
        AttrSet::from_iter([0, 1, 2, 4, 5]),
        AttrSet::from_iter([0, 2, 3, 6, 7]),
    ];
    let two = rule.with_targets(targets);
    let t = std::time::Instant::now();
    let sb = size_bound(FunctionClass::Polymatroid, &two).unwrap();
    eprintln!("pair bound = {} in {:?}", sb.objective, t.elapsed());
}
