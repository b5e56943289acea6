//! Randomized end-to-end checks of the interpreter and the evaluation
//! strategies against the brute-force join oracle.

use pandaq_core::attrset::AttrSet;
use pandaq_core::engine::{
    brute_min_model, eval_boolean_subw, eval_full_wco, greedy_model,
};
use pandaq_core::panda::{panda_run, PandaOptions};
use pandaq_core::relalg::{brute_force_join, is_model_of, Relation};
use pandaq_core::rational::count_within_pow2;
use pandaq_core::testkit::{random_rule_and_data, random_targets, rng};
use rand::Rng;

#[test]
fn panda_models_are_valid_on_random_instances() {
    let mut r = rng(0xfeed_0001);
    let mut done = 0;
    while done < 100 {
        let n = r.gen_range(2..=5usize);
        let (mut rule, data) = random_rule_and_data(n, 200, &mut r);
        let targets = random_targets(&rule, r.gen_range(1..=3), &mut r);
        rule.targets = targets;
        let report = match panda_run(&rule, &data, PandaOptions::default()) {
            Ok(rep) => rep,
            Err(e) => panic!("case {done}: panda failed: {e}"),
        };
        let rels: Vec<&Relation> = rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        let body = brute_force_join(&rels);
        assert!(
            is_model_of(&report.model, &body, &rule.targets),
            "case {done}: output is not a model"
        );
        // Budget: materialized intermediates within the proved bound.
        assert!(
            count_within_pow2(report.max_intermediate, &report.obj),
            "case {done}: intermediate {} over 2^{}",
            report.max_intermediate,
            report.obj
        );
        done += 1;
    }
}

#[test]
fn full_wco_matches_oracle_on_random_instances() {
    let mut r = rng(0xfeed_0002);
    for case in 0..100 {
        let n = r.gen_range(2..=5usize);
        let (rule, data) = random_rule_and_data(n, 200, &mut r);
        let out = eval_full_wco(&rule, &data).unwrap();
        let rels: Vec<&Relation> = rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        let oracle = brute_force_join(&rels);
        assert_eq!(out, oracle, "case {case}");
    }
}

#[test]
fn boolean_subw_matches_oracle_on_random_instances() {
    let mut r = rng(0xfeed_0003);
    for case in 0..100 {
        let n = r.gen_range(2..=5usize);
        let (rule, data) = random_rule_and_data(n, 60, &mut r);
        let verdict = eval_boolean_subw(&rule, &data).unwrap();
        let rels: Vec<&Relation> = rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        let oracle = !brute_force_join(&rels).is_empty();
        assert_eq!(verdict, oracle, "case {case}");
    }
}

#[test]
fn model_size_sandwich_on_tiny_instances() {
    // minimum model <= panda model, greedy model; all valid models.
    let mut r = rng(0xfeed_0004);
    let mut done = 0;
    while done < 40 {
        let n = r.gen_range(2..=4usize);
        let (mut rule, data) = random_rule_and_data(n, 6, &mut r);
        let targets = random_targets(&rule, r.gen_range(1..=2), &mut r);
        rule.targets = targets;
        let rels: Vec<&Relation> = rule
            .hypergraph
            .edges
            .iter()
            .map(|(_, id)| &data[id])
            .collect();
        let body = brute_force_join(&rels);
        if body.len() > 20 {
            continue;
        }
        let minimum = brute_min_model(&rule, &data).unwrap();
        let report = panda_run(&rule, &data, PandaOptions::default()).unwrap();
        let panda_size = report.model.values().map(|t| t.len() as u64).max().unwrap_or(0);
        let greedy = greedy_model(&rule, &data).unwrap();
        let greedy_size = greedy.values().map(|t| t.len() as u64).max().unwrap_or(0);
        assert!(is_model_of(&greedy, &body, &rule.targets), "case {done}");
        assert!(panda_size >= minimum, "case {done}: panda below the minimum");
        assert!(greedy_size >= minimum, "case {done}: greedy below the minimum");
        done += 1;
    }
}

#[test]
fn greedy_model_log_size_within_polymatroid_bound() {
    use pandaq_core::bounds::size_bound;
    use pandaq_core::rule::FunctionClass;

    let mut r = rng(0xfeed_0005);
    for case in 0..30 {
        let n = r.gen_range(2..=4usize);
        let (mut rule, data) = random_rule_and_data(n, 50, &mut r);
        let targets = random_targets(&rule, r.gen_range(1..=2), &mut r);
        rule.targets = targets;
        let sb = size_bound(FunctionClass::Polymatroid, &rule).unwrap();
        let greedy = greedy_model(&rule, &data).unwrap();
        let size = greedy.values().map(|t| t.len() as u64).max().unwrap_or(0);
        assert!(
            count_within_pow2(size, &sb.objective),
            "case {case}: greedy size {size} over 2^{}",
            sb.objective
        );
    }
}

#[test]
fn single_target_rule_greedy_is_full_projection() {
    let mut r = rng(0xfeed_0006);
    let (rule, data) = random_rule_and_data(3, 30, &mut r);
    let greedy = greedy_model(&rule, &data).unwrap();
    let rels: Vec<&Relation> = rule
        .hypergraph
        .edges
        .iter()
        .map(|(_, id)| &data[id])
        .collect();
    let body = brute_force_join(&rels);
    let full = AttrSet::full(3);
    assert_eq!(greedy[&full], body);
}
