//! The PANDA interpreter: executes a proof sequence as relational
//! operations to compute a model of a disjunctive rule within its
//! polymatroid bound.
//!
//! Each proof step maps to a relational operator:
//!
//! * submodularity — bookkeeping only (a degree support is transferred),
//! * monotonicity — project the supporting guard,
//! * decomposition — partition the guard by degree and branch,
//! * composition — join two guard projections when the budget allows,
//!   otherwise truncate the inequality and restart with a fresh sequence.
//!
//! Four invariants are re-checked after every executed step: degree
//! support for every positive `δ` coordinate, `0 < ‖λ‖ ≤ 1`, the potential
//! `Σ δ·n ≤ ‖λ‖·OBJ`, and `n_{Y|∅} ≤ OBJ` for every supported
//! unconditional coordinate.

use crate::attrset::AttrSet;
use crate::bounds::{size_bound, SizeBound};
use crate::error::Error;
use crate::proofseq::{
    apply_step, construct_inductive, tighten_witness, truncate, FlowInequality, Pair, ProofStep,
    SparseVec, StepKind,
};
use crate::rational::{count_within_pow2, log2_dyadic, rat, Rational};
use crate::relalg::{degree, join, partition_by_degree, project, Database, Model, Relation};
use crate::rule::{Diagnostic, DisjunctiveRule, FunctionClass};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

/// A degree constraint tracked during execution, guarded by a relation in
/// the working set.
#[derive(Clone, Debug)]
pub struct GuardedConstraint {
    pub x: AttrSet,
    pub y: AttrSet,
    /// Log-scale bound (dyadic when measured from a non-power-of-two count).
    pub log_bound: Rational,
    /// Index into the working relation list.
    pub guard: usize,
}

/// The full state of one PANDA subproblem.
#[derive(Clone, Debug)]
pub struct PandaState {
    pub relations: Vec<Arc<Relation>>,
    pub constraints: Vec<GuardedConstraint>,
    /// Current inequality: `λ` fixed between restarts, `δ` advanced by
    /// steps, `(σ, μ)` maintained as a live witness.
    pub ineq: FlowInequality,
    /// Supporting constraint (index) per positive `δ` coordinate.
    pub support: BTreeMap<Pair, usize>,
    pub remaining: VecDeque<ProofStep>,
    /// The runtime budget in bits.
    pub obj: Rational,
}

/// Dyadic-rounding allowance for the potential and budget diagnostics;
/// exact inputs (powers of two everywhere) never need it.
fn rounding_allowance() -> Rational {
    rat(1, 1 << 20)
}

/// Exact-arithmetic check of the four execution invariants; returns one
/// diagnostic per violation.
pub fn assert_invariants(state: &PandaState) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let tol = rounding_allowance();

    // (1) degree support: every positive δ coordinate has a constraint
    // with Z ⊆ X, W ⊆ Y, W−Z = Y−X.
    for (p, v) in &state.ineq.delta {
        if !v.is_positive() {
            continue;
        }
        match state.support.get(p) {
            None => out.push(Diagnostic(format!("δ_{p} > 0 has no supporting constraint"))),
            Some(&ci) => {
                let c = &state.constraints[ci];
                let shape_ok = c.x.is_subset(p.x)
                    && c.y.is_subset(p.y)
                    && c.y.difference(c.x) == p.y.difference(p.x);
                if !shape_ok {
                    out.push(Diagnostic(format!(
                        "support ({}, {}) has the wrong shape for δ_{p}",
                        c.x, c.y
                    )));
                }
            }
        }
    }

    // (2) 0 < ‖λ‖₁ ≤ 1.
    let lambda_norm: Rational = state.ineq.lambda.values().cloned().sum();
    if !lambda_norm.is_positive() || lambda_norm > Rational::from_integer(1.into()) {
        out.push(Diagnostic(format!("‖λ‖₁ = {lambda_norm} out of (0, 1]")));
    }

    // (3) potential: Σ δ_{Y|X} · n(support) ≤ ‖λ‖₁ · OBJ.
    let mut potential = Rational::zero();
    for (p, v) in &state.ineq.delta {
        if let Some(&ci) = state.support.get(p) {
            potential += v * &state.constraints[ci].log_bound;
        }
    }
    let cap = &lambda_norm * &state.obj + &tol;
    if potential > cap {
        out.push(Diagnostic(format!(
            "potential {potential} exceeds ‖λ‖·OBJ = {}",
            lambda_norm * &state.obj
        )));
    }

    // (4) every supported unconditional coordinate fits the budget.
    for (p, v) in &state.ineq.delta {
        if p.x.is_empty() && v.is_positive() {
            if let Some(&ci) = state.support.get(p) {
                if state.constraints[ci].log_bound > &state.obj + &tol {
                    out.push(Diagnostic(format!(
                        "supported δ_{p} has n = {} above OBJ = {}",
                        state.constraints[ci].log_bound, state.obj
                    )));
                }
            }
        }
    }
    out
}

/// Options for a run.
#[derive(Clone, Copy, Default)]
pub struct PandaOptions {
    /// Record one line per executed proof step.
    pub trace: bool,
}

/// Outcome of a PANDA run.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub model: Model,
    /// The proved bound (bits) the run stayed within.
    pub obj: Rational,
    /// Largest relation materialized during execution.
    pub max_intermediate: u64,
    /// Largest output table after per-target unions.
    pub max_model_table: u64,
    /// Subproblems spawned by decomposition steps.
    pub branch_count: u64,
    /// Case-4b restarts across all subproblems.
    pub restarts: u64,
    pub steps_executed: u64,
    pub trace: Option<Vec<String>>,
}

impl RunReport {
    /// Structured-text form of the run summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("panda run report v1\n");
        out.push_str(&format!("obj_bits {}\n", self.obj));
        out.push_str(&format!("max_intermediate {}\n", self.max_intermediate));
        out.push_str(&format!("max_model_table {}\n", self.max_model_table));
        out.push_str(&format!("branches {}\n", self.branch_count));
        out.push_str(&format!("restarts {}\n", self.restarts));
        out.push_str(&format!("steps {}\n", self.steps_executed));
        for (b, rel) in &self.model {
            out.push_str(&format!("target {} rows {}\n", b, rel.len()));
        }
        if let Some(trace) = &self.trace {
            for line in trace {
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }
}

/// Minimal-`N` constraint whose shape supports the coordinate `p`, ties by
/// `(Z, W)` bitmask order.
fn find_support(constraints: &[GuardedConstraint], p: Pair) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in constraints.iter().enumerate() {
        let ok = c.x.is_subset(p.x)
            && c.y.is_subset(p.y)
            && c.y.difference(c.x) == p.y.difference(p.x);
        if !ok {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(j) => {
                let cj = &constraints[j];
                let better = (&c.log_bound, c.x, c.y) < (&cj.log_bound, cj.x, cj.y);
                Some(if better { i } else { j })
            }
        };
    }
    best
}

/// Installs (or improves) the support entry for `p`.
fn merge_support(state: &mut PandaState, p: Pair, candidate: usize) {
    let entry = state.support.entry(p).or_insert(candidate);
    let cur = &state.constraints[*entry];
    let new = &state.constraints[candidate];
    if (&new.log_bound, new.x, new.y) < (&cur.log_bound, cur.x, cur.y) {
        *entry = candidate;
    }
}

struct Executor<'a> {
    targets: &'a [AttrSet],
    obj: Rational,
    model: Model,
    max_intermediate: u64,
    max_model_table: u64,
    branch_count: u64,
    restarts: u64,
    steps_executed: u64,
    trace: Option<Vec<String>>,
}

impl Executor<'_> {
    fn trace_line(&mut self, line: String) {
        if let Some(t) = &mut self.trace {
            t.push(line);
        }
    }

    fn record_materialized(&mut self, rel: &Relation) {
        self.max_intermediate = self.max_intermediate.max(rel.len() as u64);
    }

    fn budget_check(&self, rel: &Relation, what: &str) -> Result<(), Error> {
        if !count_within_pow2(rel.len() as u64, &self.obj) {
            return Err(Error::Internal(format!(
                "{what} of size {} exceeds the budget 2^{}",
                rel.len(),
                self.obj
            )));
        }
        Ok(())
    }

    fn emit(&mut self, b: AttrSet, rel: Relation) {
        let entry = self
            .model
            .entry(b)
            .or_insert_with(|| Relation::empty(b.iter().collect()));
        let merged = Relation::new(
            entry.schema().to_vec(),
            entry.tuples().cloned().chain(rel.tuples().cloned()),
        )
        .expect("schemas agree");
        self.max_model_table = self.max_model_table.max(merged.len() as u64);
        *entry = merged;
    }
}

/// Runs PANDA on a rule and its data.
///
/// The data is validated against the declared constraints first; the bound
/// LP then provides `(λ, δ, σ, μ)` and the budget `OBJ`, the inductive
/// construction provides the proof sequence, and the interpreter executes
/// it, asserting the four invariants after every step.
pub fn panda_run(
    rule: &DisjunctiveRule,
    data: &Database,
    options: PandaOptions,
) -> Result<RunReport, Error> {
    let diags = crate::rule::validate_rule(rule);
    if !diags.is_empty() {
        return Err(Error::Domain(format!("invalid rule: {}", diags[0])));
    }
    validate_data(rule, data)?;

    let sb = size_bound(FunctionClass::Polymatroid, rule)?;
    panda_run_with_bound(rule, data, &sb, options)
}

/// Runs PANDA against an already-solved bound (used by the width
/// strategies, which solve many related LPs up front).
pub fn panda_run_with_bound(
    rule: &DisjunctiveRule,
    data: &Database,
    sb: &SizeBound,
    options: PandaOptions,
) -> Result<RunReport, Error> {
    let mut exec = Executor {
        targets: &rule.targets,
        obj: sb.objective.clone(),
        model: BTreeMap::new(),
        max_intermediate: 0,
        max_model_table: 0,
        branch_count: 1,
        restarts: 0,
        steps_executed: 0,
        trace: options.trace.then(Vec::new),
    };
    for b in &rule.targets {
        exec.model
            .insert(*b, Relation::empty(b.iter().collect()));
    }

    // Empty input: the empty model is a model.
    let mut relations = Vec::new();
    let mut constraints = Vec::new();
    let mut all_nonempty = true;
    for (support, id) in &rule.hypergraph.edges {
        let rel = data
            .get(id)
            .ok_or_else(|| Error::Domain(format!("missing data for {id}")))?;
        if !rel.attrs().is_subset(*support) || !support.is_subset(rel.attrs()) {
            return Err(Error::Domain(format!(
                "data for {id} has schema {} but the edge support is {support}",
                rel.attrs()
            )));
        }
        all_nonempty &= !rel.is_empty();
        relations.push(Arc::new(rel.clone()));
    }
    if !all_nonempty {
        return Ok(finish(exec));
    }
    for c in &rule.constraints {
        let guard = match c.guard {
            Some(id) => rule
                .hypergraph
                .edges
                .iter()
                .position(|(_, r)| *r == id)
                .ok_or_else(|| Error::Domain(format!("constraint guard {id} not in body")))?,
            None => rule
                .hypergraph
                .edges
                .iter()
                .position(|(s, _)| c.y.is_subset(*s))
                .ok_or_else(|| Error::Domain("unguarded constraint".into()))?,
        };
        constraints.push(GuardedConstraint {
            x: c.x,
            y: c.y,
            log_bound: c.log_bound.bits().clone(),
            guard,
        });
    }

    let steps = construct_inductive(&sb.ineq)?;
    let mut root = PandaState {
        relations,
        constraints,
        ineq: sb.ineq.clone(),
        support: BTreeMap::new(),
        remaining: steps.steps.into(),
        obj: sb.objective.clone(),
    };
    let delta_pairs: Vec<Pair> = root.ineq.delta.keys().copied().collect();
    for p in delta_pairs {
        let ci = find_support(&root.constraints, p).ok_or_else(|| {
            Error::Internal(format!("initial δ_{p} has no supporting constraint"))
        })?;
        root.support.insert(p, ci);
    }
    check_state(&root)?;

    let mut stack = vec![root];
    while let Some(sub) = stack.pop() {
        run_subproblem(sub, &mut exec, &mut stack)?;
    }
    Ok(finish(exec))
}

fn finish(exec: Executor<'_>) -> RunReport {
    RunReport {
        model: exec.model,
        obj: exec.obj,
        max_intermediate: exec.max_intermediate,
        max_model_table: exec.max_model_table,
        branch_count: exec.branch_count,
        restarts: exec.restarts,
        steps_executed: exec.steps_executed,
        trace: exec.trace,
    }
}

fn check_state(state: &PandaState) -> Result<(), Error> {
    let diags = assert_invariants(state);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::Internal(format!("invariant violation: {}", diags[0])))
    }
}

/// Measured degree statistics must respect every declared constraint.
fn validate_data(rule: &DisjunctiveRule, data: &Database) -> Result<(), Error> {
    for c in &rule.constraints {
        let guards: Vec<_> = match c.guard {
            Some(id) => vec![id],
            None => rule
                .hypergraph
                .edges
                .iter()
                .filter(|(s, _)| c.y.is_subset(*s))
                .map(|(_, id)| *id)
                .take(1)
                .collect(),
        };
        for id in guards {
            let rel = data
                .get(&id)
                .ok_or_else(|| Error::Domain(format!("missing data for {id}")))?;
            let measured = degree(rel, c.y, c.x)?;
            let ok = match c.raw_bound {
                Some(n) => measured <= n,
                None => count_within_pow2(measured, c.log_bound.bits()),
            };
            if !ok {
                return Err(Error::DataViolation(format!(
                    "deg_{id}({} | {}) = {measured} exceeds the declared bound 2^{}",
                    c.y,
                    c.x,
                    c.log_bound.bits()
                )));
            }
        }
    }
    Ok(())
}

/// Executes one subproblem to completion, pushing decomposition branches
/// onto the shared stack.
fn run_subproblem(
    mut sub: PandaState,
    exec: &mut Executor<'_>,
    stack: &mut Vec<PandaState>,
) -> Result<(), Error> {
    const MAX_RESTARTS_PER_SUBPROBLEM: u64 = 100_000;
    let mut local_restarts = 0;
    loop {
        // Base case: a working relation whose schema equals a target.
        let hit = exec.targets.iter().find_map(|b| {
            sub.relations
                .iter()
                .find(|r| r.attrs() == *b)
                .map(|r| (*b, Arc::clone(r)))
        });
        if let Some((b, rel)) = hit {
            exec.trace_line(format!("emit target {b} ({} rows)", rel.len()));
            exec.emit(b, (*rel).clone());
            return Ok(());
        }

        let Some(step) = sub.remaining.pop_front() else {
            // Sequence exhausted: δ dominates λ, so some target coordinate
            // is positive and supported; project its guard.
            let target = exec
                .targets
                .iter()
                .find(|b| {
                    sub.ineq
                        .delta
                        .get(&Pair::unconditional(**b))
                        .is_some_and(|v| v.is_positive())
                })
                .copied()
                .ok_or_else(|| {
                    Error::Internal("proof sequence exhausted with no target coordinate".into())
                })?;
            let ci = *sub
                .support
                .get(&Pair::unconditional(target))
                .ok_or_else(|| Error::Internal("final target coordinate unsupported".into()))?;
            let guard = &sub.relations[sub.constraints[ci].guard];
            let table = project(guard, target)?;
            exec.record_materialized(&table);
            exec.budget_check(&table, "final target projection")?;
            exec.trace_line(format!("emit target {target} by projection ({} rows)", table.len()));
            exec.emit(target, table);
            return Ok(());
        };

        exec.steps_executed += 1;
        if std::env::var_os("PANDAQ_DEBUG").is_some() && exec.steps_executed % 100_000 == 0 {
            eprintln!(
                "[debug] steps={} restarts={} stack-ish branches={}",
                exec.steps_executed, exec.restarts, exec.branch_count
            );
        }
        let w = step.weight.clone();
        match step.kind {
            StepKind::Submodularity { i, j } => {
                let meet = i.intersect(j);
                let from = if meet.is_empty() {
                    Pair::unconditional(i)
                } else {
                    Pair::new(meet, i)
                };
                let sup = sub.support.get(&from).copied();
                apply_step(&mut sub.ineq.delta, &step)
                    .map_err(|e| Error::Internal(format!("submodularity step: {e}")))?;
                if let Some(ci) = sup {
                    merge_support(&mut sub, Pair::new(j, i.union(j)), ci);
                    if !sub.ineq.delta.contains_key(&from) {
                        sub.support.remove(&from);
                    }
                }
                consume_witness_sigma(&mut sub, i, j, &w)?;
                exec.trace_line(format!("sub {i} {j}"));
            }
            StepKind::Monotonicity { x, y } => {
                let from = Pair::unconditional(y);
                let ci = *sub.support.get(&from).ok_or_else(|| {
                    Error::Internal(format!("monotonicity step on unsupported δ_{from}"))
                })?;
                apply_step(&mut sub.ineq.delta, &step)
                    .map_err(|e| Error::Internal(format!("monotonicity step: {e}")))?;
                if !sub.ineq.delta.contains_key(&from) {
                    sub.support.remove(&from);
                }
                if !x.is_empty() {
                    let guard_idx = sub.constraints[ci].guard;
                    let projection = project(&sub.relations[guard_idx], x)?;
                    exec.record_materialized(&projection);
                    exec.budget_check(&projection, "monotonicity projection")?;
                    let log = log2_dyadic(projection.len() as u64, 32)?.into_bits();
                    exec.trace_line(format!(
                        "mono {y} -> {x}: project guard to {} rows",
                        projection.len()
                    ));
                    sub.relations.push(Arc::new(projection));
                    sub.constraints.push(GuardedConstraint {
                        x: AttrSet::EMPTY,
                        y: x,
                        log_bound: log,
                        guard: sub.relations.len() - 1,
                    });
                    let new_ci = sub.constraints.len() - 1;
                    merge_support(&mut sub, Pair::unconditional(x), new_ci);
                } else {
                    exec.trace_line(format!("mono {y} -> ∅: drop"));
                }
                consume_witness_mu(&mut sub, x, y, &w)?;
            }
            StepKind::Decomposition { y, x } => {
                if x.is_empty() {
                    // Zero step vector: nothing to do.
                    exec.trace_line(format!("decomp {y} -> ∅ (no-op)"));
                    continue;
                }
                let from = Pair::unconditional(y);
                let ci = *sub.support.get(&from).ok_or_else(|| {
                    Error::Internal(format!("decomposition step on unsupported δ_{from}"))
                })?;
                apply_step(&mut sub.ineq.delta, &step)
                    .map_err(|e| Error::Internal(format!("decomposition step: {e}")))?;
                if !sub.ineq.delta.contains_key(&from) {
                    sub.support.remove(&from);
                }
                let guard_idx = sub.constraints[ci].guard;
                let guard = Arc::clone(&sub.relations[guard_idx]);
                let parts = partition_by_degree(&guard, y, x)?;
                exec.trace_line(format!("decomp {y} -> {x}: {} parts", parts.len()));
                exec.branch_count += parts.len() as u64 - 1;
                for part in parts.into_iter().rev() {
                    let mut branch = sub.clone();
                    exec.record_materialized(&part.relation);
                    branch.relations.push(Arc::new(part.relation));
                    let rel_idx = branch.relations.len() - 1;
                    let log_x = log2_dyadic(part.n_x, 32)?.into_bits();
                    let log_yx = log2_dyadic(part.n_yx, 32)?.into_bits();
                    branch.constraints.push(GuardedConstraint {
                        x: AttrSet::EMPTY,
                        y: x,
                        log_bound: log_x,
                        guard: rel_idx,
                    });
                    let cx = branch.constraints.len() - 1;
                    branch.constraints.push(GuardedConstraint {
                        x,
                        y,
                        log_bound: log_yx,
                        guard: rel_idx,
                    });
                    let cyx = branch.constraints.len() - 1;
                    merge_support(&mut branch, Pair::unconditional(x), cx);
                    merge_support(&mut branch, Pair::new(x, y), cyx);
                    check_state(&branch)?;
                    stack.push(branch);
                }
                return Ok(());
            }
            StepKind::Composition { x, y } => {
                if x.is_empty() {
                    exec.trace_line(format!("comp ∅ -> {y} (no-op)"));
                    continue;
                }
                let cx = *sub.support.get(&Pair::unconditional(x)).ok_or_else(|| {
                    Error::Internal(format!("composition step with unsupported δ_{{{x}|∅}}"))
                })?;
                let cyx = *sub.support.get(&Pair::new(x, y)).ok_or_else(|| {
                    Error::Internal(format!("composition step with unsupported δ_{{{y}|{x}}}"))
                })?;
                let budget_ok = {
                    let total =
                        &sub.constraints[cx].log_bound + &sub.constraints[cyx].log_bound;
                    total <= sub.obj
                };
                if budget_ok {
                    // Case 4a: materialize the join.
                    apply_step(&mut sub.ineq.delta, &step)
                        .map_err(|e| Error::Internal(format!("composition step: {e}")))?;
                    for p in [Pair::unconditional(x), Pair::new(x, y)] {
                        if !sub.ineq.delta.contains_key(&p) {
                            sub.support.remove(&p);
                        }
                    }
                    let r = Arc::clone(&sub.relations[sub.constraints[cx].guard]);
                    let s = Arc::clone(&sub.relations[sub.constraints[cyx].guard]);
                    let w_set = sub.constraints[cyx].y;
                    let left = project(&r, x)?;
                    let right = project(&s, w_set)?;
                    let table = join(&left, &right);
                    debug_assert_eq!(table.attrs(), y, "composition output schema");
                    exec.record_materialized(&table);
                    exec.budget_check(&table, "composition join")?;
                    exec.trace_line(format!(
                        "comp {x} + {y}|{x}: join {} x {} = {} rows",
                        left.len(),
                        right.len(),
                        table.len()
                    ));
                    if table.is_empty() {
                        // This branch's body join is empty; it contributes
                        // nothing to the model.
                        return Ok(());
                    }
                    let log = log2_dyadic(table.len() as u64, 32)?.into_bits();
                    sub.relations.push(Arc::new(table));
                    sub.constraints.push(GuardedConstraint {
                        x: AttrSet::EMPTY,
                        y,
                        log_bound: log,
                        guard: sub.relations.len() - 1,
                    });
                    let new_ci = sub.constraints.len() - 1;
                    merge_support(&mut sub, Pair::unconditional(y), new_ci);
                } else {
                    // Case 4b: the join would blow the budget. Advance δ,
                    // truncate at Y, and restart with a fresh sequence.
                    exec.restarts += 1;
                    local_restarts += 1;
                    if local_restarts > MAX_RESTARTS_PER_SUBPROBLEM {
                        return Err(Error::Internal("restart budget exhausted".into()));
                    }
                    apply_step(&mut sub.ineq.delta, &step)
                        .map_err(|e| Error::Internal(format!("composition step: {e}")))?;
                    let tight = tighten_witness(&sub.ineq)?;
                    let truncated = truncate(&tight, y)?;
                    if truncated.lambda.is_empty() {
                        return Err(Error::Internal("restart drove λ to zero".into()));
                    }
                    if std::env::var_os("PANDAQ_DEBUG").is_some() {
                        eprintln!(
                            "[debug] restart #{} at {y}: D={} |delta|={} |sigma|={} |mu|={}",
                            exec.restarts,
                            truncated.common_denominator(),
                            truncated.delta.len(),
                            truncated.sigma.len(),
                            truncated.mu.len()
                        );
                    }
                    exec.trace_line(format!(
                        "restart: truncate at {y}, ‖λ‖ -> {}",
                        truncated
                            .lambda
                            .values()
                            .cloned()
                            .sum::<Rational>()
                    ));
                    sub.ineq = truncated;
                    sub.support.retain(|p, _| sub.ineq.delta.contains_key(p));
                    // Re-derive supports for any coordinate that lost its
                    // entry (all positive coordinates must be supported).
                    let missing: Vec<Pair> = sub
                        .ineq
                        .delta
                        .keys()
                        .filter(|p| !sub.support.contains_key(*p))
                        .copied()
                        .collect();
                    for p in missing {
                        let ci = find_support(&sub.constraints, p).ok_or_else(|| {
                            Error::Internal(format!("post-restart δ_{p} unsupported"))
                        })?;
                        sub.support.insert(p, ci);
                    }
                    let seq = construct_inductive(&sub.ineq)?;
                    sub.remaining = seq.steps.into();
                }
            }
        }
        check_state(&sub)?;
    }
}

/// Maintains the live witness across a submodularity step.
fn consume_witness_sigma(
    sub: &mut PandaState,
    i: AttrSet,
    j: AttrSet,
    w: &Rational,
) -> Result<(), Error> {
    let key = if i <= j { (i, j) } else { (j, i) };
    let entry = sub
        .ineq
        .sigma
        .get_mut(&key)
        .ok_or_else(|| Error::Internal("submodularity step without matching σ".into()))?;
    *entry -= w;
    if entry.is_negative() {
        return Err(Error::Internal("σ driven negative".into()));
    }
    if entry.is_zero() {
        sub.ineq.sigma.remove(&key);
    }
    Ok(())
}

/// Maintains the live witness across a monotonicity step.
fn consume_witness_mu(
    sub: &mut PandaState,
    x: AttrSet,
    y: AttrSet,
    w: &Rational,
) -> Result<(), Error> {
    let key = Pair::new(x, y);
    let entry = sub
        .ineq
        .mu
        .get_mut(&key)
        .ok_or_else(|| Error::Internal("monotonicity step without matching μ".into()))?;
    *entry -= w;
    if entry.is_negative() {
        return Err(Error::Internal("μ driven negative".into()));
    }
    if entry.is_zero() {
        sub.ineq.mu.remove(&key);
    }
    Ok(())
}

/// Convenience wrapper: build a sparse λ map from pairs.
pub fn lambda_map(entries: &[(AttrSet, Rational)]) -> SparseVec<AttrSet> {
    entries
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(b, w)| (*b, w.clone()))
        .collect()
}
