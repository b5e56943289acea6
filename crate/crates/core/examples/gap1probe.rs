use pandaq_core::rule::FunctionClass;
use pandaq_core::widths::{classic_width, da_maximin_width, enumerate_tds, WidthKind};
use pandaq_cli_probe::*;

mod pandaq_cli_probe {
    // Inline gap1 construction (mirrors the generator).
    use pandaq_core::attrset::AttrSet;
    use pandaq_core::rule::{DegreeConstraint, DisjunctiveRule, Hypergraph};
    pub fn gap1_rule(m: usize, k: usize) -> DisjunctiveRule {
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
}

fn main() {
    let rule = gap1_rule(2, 2);
    let t0 = std::time::Instant::now();
    let tds = enumerate_tds(&rule.hypergraph).unwrap();
    println!("TDs: {} in {:?}", tds.len(), t0.elapsed());
    for td in tds.iter().take(8) {
        println!("  bags: {:?}", td.bag_set());
    }
    let t1 = std::time::Instant::now();
    let (fhtw, _) = classic_width(&rule.hypergraph, WidthKind::FractionalHypertree).unwrap();
    println!("fhtw = {} in {:?}", fhtw, t1.elapsed());
    let t2 = std::time::Instant::now();
    let (maximin, targets, _) = da_maximin_width(&rule, FunctionClass::Polymatroid).unwrap();
    println!("da-maximin = {} with {} targets in {:?}", maximin, targets.len(), t2.elapsed());
}
