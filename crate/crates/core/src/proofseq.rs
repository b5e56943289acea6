//! Shannon flow inequalities and their proof sequences.
//!
//! A flow inequality `⟨λ, h⟩ ≤ ⟨δ, h⟩` (valid for every polymatroid `h`)
//! is certified by a witness `(σ, μ)` through the inflow balance at every
//! nonempty set. A proof sequence replays the inequality as a list of
//! weighted rewrite steps — submodularity, monotonicity, composition,
//! decomposition — that transform `δ` into a vector dominating `λ` while
//! staying non-negative. Two constructions are provided: the inductive one
//! and the flow-network one; both outputs replay successfully through
//! [`verify_proof_sequence`].

use crate::attrset::AttrSet;
use crate::error::Error;
use crate::rational::{common_denominator, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// A conditional coordinate `(X, Y)` with `∅ ⊆ X ⊂ Y`; indexes the entries
/// of `δ` and `μ`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Pair {
    pub x: AttrSet,
    pub y: AttrSet,
}

impl Pair {
    pub fn new(x: AttrSet, y: AttrSet) -> Pair {
        debug_assert!(x.is_strict_subset(y), "pair needs X ⊂ Y");
        Pair { x, y }
    }

    pub fn unconditional(y: AttrSet) -> Pair {
        Pair::new(AttrSet::EMPTY, y)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.y, self.x)
    }
}

/// Sparse non-negative vector keyed by `K`, with zero entries removed.
pub type SparseVec<K> = BTreeMap<K, Rational>;

/// Adds `amount` to `map[key]`, dropping the entry when it reaches zero.
/// Returns an error if the entry would go negative.
fn add_entry<K: Ord + Copy + fmt::Debug>(
    map: &mut SparseVec<K>,
    key: K,
    amount: &Rational,
) -> Result<(), Error> {
    let entry = map.entry(key).or_insert_with(Rational::zero);
    *entry += amount;
    if entry.is_negative() {
        return Err(Error::Domain(format!("entry {key:?} driven negative")));
    }
    if entry.is_zero() {
        map.remove(&key);
    }
    Ok(())
}

fn get<K: Ord>(map: &SparseVec<K>, key: &K) -> Rational {
    map.get(key).cloned().unwrap_or_else(Rational::zero)
}

fn norm1<K>(map: &SparseVec<K>) -> Rational {
    map.values().cloned().sum()
}

/// Normalized unordered pair for `σ`: smaller bitmask first.
fn sigma_key(i: AttrSet, j: AttrSet) -> (AttrSet, AttrSet) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// A Shannon flow inequality `⟨λ, h⟩ ≤ ⟨δ, h⟩` with its dual witness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlowInequality {
    pub n: usize,
    /// Target weights: nonzero only on unconditional coordinates, keyed by
    /// the target set.
    pub lambda: SparseVec<AttrSet>,
    /// Degree-style weights over pairs `(X, Y)`.
    pub delta: SparseVec<Pair>,
    /// Witness weights on submodularity constraints, keyed by the
    /// unordered incomparable pair `(I, J)`.
    pub sigma: SparseVec<(AttrSet, AttrSet)>,
    /// Witness weights on monotonicity constraints `(X, Y)`, `X ⊂ Y`
    /// (`X = ∅` entries play the role of non-negativity duals).
    pub mu: SparseVec<Pair>,
}

impl FlowInequality {
    pub fn new(
        n: usize,
        lambda: SparseVec<AttrSet>,
        delta: SparseVec<Pair>,
        sigma: SparseVec<(AttrSet, AttrSet)>,
        mu: SparseVec<Pair>,
    ) -> FlowInequality {
        let mut ineq = FlowInequality {
            n,
            lambda,
            delta,
            sigma,
            mu,
        };
        ineq.lambda.retain(|_, v| !v.is_zero());
        ineq.delta.retain(|_, v| !v.is_zero());
        ineq.sigma.retain(|_, v| !v.is_zero());
        ineq.mu.retain(|_, v| !v.is_zero());
        ineq
    }

    /// The signed dual balance at every nonempty set, indexed by bitmask.
    pub fn inflow_all(&self) -> Vec<Rational> {
        let mut inflow = vec![Rational::zero(); 1 << self.n];
        for (p, d) in &self.delta {
            inflow[p.y.index()] += d;
            if !p.x.is_empty() {
                inflow[p.x.index()] -= d;
            }
        }
        for ((i, j), s) in &self.sigma {
            let meet = i.intersect(*j);
            if !meet.is_empty() {
                inflow[meet.index()] += s;
            }
            inflow[i.union(*j).index()] += s;
            inflow[i.index()] -= s;
            inflow[j.index()] -= s;
        }
        for (p, m) in &self.mu {
            inflow[p.y.index()] -= m;
            if !p.x.is_empty() {
                inflow[p.x.index()] += m;
            }
        }
        inflow
    }

    /// `inflow(Z)` for a single nonempty `Z`.
    pub fn inflow(&self, z: AttrSet) -> Result<Rational, Error> {
        if z.is_empty() {
            return Err(Error::Domain("inflow is undefined at ∅".into()));
        }
        Ok(self.inflow_all()[z.index()].clone())
    }

    /// Least common denominator of every entry in `(λ, δ, σ, μ)`.
    pub fn common_denominator(&self) -> BigInt {
        common_denominator(
            self.lambda
                .values()
                .chain(self.delta.values())
                .chain(self.sigma.values())
                .chain(self.mu.values()),
        )
    }

    /// `⟨λ, h⟩` against a dense set function over `2^n`.
    pub fn eval_lambda(&self, h: &[Rational]) -> Rational {
        self.lambda
            .iter()
            .map(|(b, w)| w * &h[b.index()])
            .sum()
    }

    /// `⟨δ, h⟩ = Σ δ_{Y|X} (h(Y) − h(X))` against a dense set function.
    pub fn eval_delta(&self, h: &[Rational]) -> Rational {
        self.delta
            .iter()
            .map(|(p, w)| w * (&h[p.y.index()] - &h[p.x.index()]))
            .sum()
    }
}

/// Verifies the witness: all entries non-negative (structural) and
/// `inflow(Z) ≥ λ_Z` for every nonempty `Z`.
pub fn verify_witness(ineq: &FlowInequality) -> bool {
    let all = ineq
        .lambda
        .values()
        .chain(ineq.delta.values())
        .chain(ineq.sigma.values())
        .chain(ineq.mu.values());
    for v in all {
        if v.is_negative() {
            return false;
        }
    }
    let inflow = ineq.inflow_all();
    for z in 1usize..(1 << ineq.n) {
        let lam = get(&ineq.lambda, &AttrSet::from_bits(z as u32));
        if inflow[z] < lam {
            return false;
        }
    }
    true
}

/// Raises `μ_{∅,Z}` by the slack at every `Z` so that `inflow(Z) = λ_Z`
/// exactly everywhere.
pub fn tighten_witness(ineq: &FlowInequality) -> Result<FlowInequality, Error> {
    if !verify_witness(ineq) {
        return Err(Error::Domain("cannot tighten an infeasible witness".into()));
    }
    let mut out = ineq.clone();
    let inflow = ineq.inflow_all();
    for z in 1usize..(1 << ineq.n) {
        let zset = AttrSet::from_bits(z as u32);
        let slack = &inflow[z] - get(&ineq.lambda, &zset);
        if slack.is_positive() {
            add_entry(&mut out.mu, Pair::unconditional(zset), &slack)?;
        }
    }
    debug_assert!(is_tight(&out));
    Ok(out)
}

fn is_tight(ineq: &FlowInequality) -> bool {
    let inflow = ineq.inflow_all();
    (1usize..(1 << ineq.n)).all(|z| inflow[z] == get(&ineq.lambda, &AttrSet::from_bits(z as u32)))
}

/// One rewrite step of a proof sequence.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StepKind {
    /// `h(I | I∩J) → h(I∪J | J)` for incomparable `I, J`.
    Submodularity { i: AttrSet, j: AttrSet },
    /// `h(Y) → h(X)`, `X ⊂ Y` (drops the term entirely when `X = ∅`).
    Monotonicity { x: AttrSet, y: AttrSet },
    /// `h(X) + h(Y|X) → h(Y)`.
    Composition { x: AttrSet, y: AttrSet },
    /// `h(Y) → h(X) + h(Y|X)`.
    Decomposition { y: AttrSet, x: AttrSet },
}

impl StepKind {
    /// The step vector as sparse `(pair, sign)` entries over conditional
    /// coordinates. Coordinates with an empty difference vanish.
    pub fn deltas(&self) -> Vec<(Pair, i8)> {
        match *self {
            StepKind::Submodularity { i, j } => {
                let meet = i.intersect(j);
                let mut out = Vec::new();
                if meet.is_empty() {
                    out.push((Pair::unconditional(i), -1));
                } else {
                    out.push((Pair::new(meet, i), -1));
                }
                out.push((Pair::new(j, i.union(j)), 1));
                out
            }
            StepKind::Monotonicity { x, y } => {
                let mut out = vec![(Pair::unconditional(y), -1)];
                if !x.is_empty() {
                    out.push((Pair::unconditional(x), 1));
                }
                out
            }
            StepKind::Composition { x, y } => {
                if x.is_empty() {
                    Vec::new()
                } else {
                    vec![
                        (Pair::unconditional(x), -1),
                        (Pair::new(x, y), -1),
                        (Pair::unconditional(y), 1),
                    ]
                }
            }
            StepKind::Decomposition { y, x } => {
                if x.is_empty() {
                    Vec::new()
                } else {
                    vec![
                        (Pair::unconditional(y), -1),
                        (Pair::unconditional(x), 1),
                        (Pair::new(x, y), 1),
                    ]
                }
            }
        }
    }

    /// `⟨f, h⟩` of the step vector against a dense set function; `≤ 0` for
    /// every polymatroid.
    pub fn eval(&self, h: &[Rational]) -> Rational {
        self.deltas()
            .into_iter()
            .map(|(p, sign)| {
                let term = &h[p.y.index()] - &h[p.x.index()];
                if sign > 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }
}

fn fmt_set(s: AttrSet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if s.is_empty() {
        return write!(f, "-");
    }
    for (k, v) in s.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StepKind::Submodularity { i, j } => {
                write!(f, "sub ")?;
                fmt_set(i, f)?;
                write!(f, " ")?;
                fmt_set(j, f)
            }
            StepKind::Monotonicity { x, y } => {
                write!(f, "mono ")?;
                fmt_set(x, f)?;
                write!(f, " ")?;
                fmt_set(y, f)
            }
            StepKind::Composition { x, y } => {
                write!(f, "comp ")?;
                fmt_set(x, f)?;
                write!(f, " ")?;
                fmt_set(y, f)
            }
            StepKind::Decomposition { y, x } => {
                write!(f, "decomp ")?;
                fmt_set(y, f)?;
                write!(f, " ")?;
                fmt_set(x, f)
            }
        }
    }
}

/// A weighted proof step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofStep {
    pub kind: StepKind,
    pub weight: Rational,
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.weight)
    }
}

/// An ordered list of weighted proof steps.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ProofSequence {
    pub steps: Vec<ProofStep>,
}

impl ProofSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Structured-text form: one step per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

/// Applies one weighted step to a `δ`-vector; errors if any coordinate
/// would go negative.
pub fn apply_step(delta: &mut SparseVec<Pair>, step: &ProofStep) -> Result<(), Error> {
    for (pair, sign) in step.kind.deltas() {
        let amount = if sign > 0 {
            step.weight.clone()
        } else {
            -step.weight.clone()
        };
        add_entry(delta, pair, &amount)?;
    }
    Ok(())
}

/// Outcome of replaying a proof sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ProofCheck {
    Valid,
    /// A coordinate went negative while applying the step at this index.
    NegativeAt(usize),
    /// All steps applied but the final vector does not dominate `λ`.
    FinalNotDominating,
}

/// Replays `δ_i = δ_{i−1} + w_i · f_i` exactly; valid iff every
/// intermediate stays non-negative and the final vector dominates `λ`.
pub fn verify_proof_sequence(ineq: &FlowInequality, seq: &ProofSequence) -> ProofCheck {
    let mut delta = ineq.delta.clone();
    for (idx, step) in seq.steps.iter().enumerate() {
        if step.weight.is_negative() || step.weight.is_zero() {
            return ProofCheck::NegativeAt(idx);
        }
        if apply_step(&mut delta, step).is_err() {
            return ProofCheck::NegativeAt(idx);
        }
    }
    for (b, lam) in &ineq.lambda {
        if get(&delta, &Pair::unconditional(*b)) < *lam {
            return ProofCheck::FinalNotDominating;
        }
    }
    ProofCheck::Valid
}

/// Inductive construction of a proof sequence.
///
/// Repeatedly picks a set `Z` with `δ_{Z|∅} > 0` (ascending bitmask order)
/// and dispatches: consume against `λ_Z`, absorb slack, or emit a
/// monotonicity / composition / decomposition-plus-submodularity step of
/// weight `1/D`, where `D` is the least common denominator of all entries.
pub fn construct_inductive(ineq: &FlowInequality) -> Result<ProofSequence, Error> {
    if !verify_witness(ineq) {
        return Err(Error::Domain(
            "cannot construct a proof sequence from an invalid witness".into(),
        ));
    }
    let d = ineq.common_denominator();
    let w = Rational::new(BigInt::one(), d);
    let neg_w = -w.clone();
    let mut cur = ineq.clone();
    let mut steps = Vec::new();

    while !cur.lambda.is_empty() {
        let z = cur
            .delta
            .keys()
            .find(|p| p.x.is_empty())
            .map(|p| p.y)
            .ok_or_else(|| {
                Error::Internal("no unconditional δ mass left while λ remains".into())
            })?;
        let z_pair = Pair::unconditional(z);

        // Case (a): consume δ_{Z|∅} directly against λ_Z.
        if get(&cur.lambda, &z).is_positive() {
            add_entry(&mut cur.lambda, z, &neg_w)?;
            add_entry(&mut cur.delta, z_pair, &neg_w)?;
            continue;
        }
        // Case (b): strictly positive inflow slack at Z.
        if cur.inflow(z)?.is_positive() {
            add_entry(&mut cur.delta, z_pair, &neg_w)?;
            continue;
        }
        // Case (c): some dual variable drains Z.
        // (c1) monotonicity μ_{X,Z}.
        let c1 = cur
            .mu
            .iter()
            .find(|(p, v)| p.y == z && **v >= w)
            .map(|(p, _)| *p);
        if let Some(p) = c1 {
            let step = ProofStep {
                kind: StepKind::Monotonicity { x: p.x, y: z },
                weight: w.clone(),
            };
            apply_step(&mut cur.delta, &step)?;
            add_entry(&mut cur.mu, p, &neg_w)?;
            steps.push(step);
            continue;
        }
        // (c2) conditional δ_{Y|Z}.
        let c2 = cur
            .delta
            .iter()
            .find(|(p, v)| p.x == z && **v >= w)
            .map(|(p, _)| *p);
        if let Some(p) = c2 {
            let step = ProofStep {
                kind: StepKind::Composition { x: z, y: p.y },
                weight: w.clone(),
            };
            apply_step(&mut cur.delta, &step)?;
            steps.push(step);
            continue;
        }
        // (c3) submodularity σ_{Z,J}.
        let c3 = cur
            .sigma
            .iter()
            .find(|((i, j), v)| (*i == z || *j == z) && **v >= w)
            .map(|(k, _)| *k);
        if let Some((i, j)) = c3 {
            let other = if i == z { j } else { i };
            let meet = z.intersect(other);
            if !meet.is_empty() {
                let step = ProofStep {
                    kind: StepKind::Decomposition { y: z, x: meet },
                    weight: w.clone(),
                };
                apply_step(&mut cur.delta, &step)?;
                steps.push(step);
            }
            let step = ProofStep {
                kind: StepKind::Submodularity { i: z, j: other },
                weight: w.clone(),
            };
            apply_step(&mut cur.delta, &step)?;
            add_entry(&mut cur.sigma, sigma_key(i, j), &neg_w)?;
            steps.push(step);
            continue;
        }
        return Err(Error::Internal(format!(
            "inflow({z}) = 0 with δ_{{{z}|∅}} > 0 but no draining dual variable"
        )));
    }
    Ok(ProofSequence { steps })
}

/// Truncates the inequality at `Y`: reduces `δ_{Y|∅}` by `1/D` and walks
/// the resulting deficit through the (tight) witness until it lands on a
/// positive `λ_Z` or vanishes at `∅`.
///
/// The result is a valid flow inequality with `λ' ≤ λ`, `δ' ≤ δ`,
/// `‖λ'‖ ≥ ‖λ‖ − 1/D`, `δ'_{Y|∅} ≤ δ_{Y|∅} − 1/D`, and the weighted norm
/// `D(3‖σ‖ + ‖δ‖ + ‖μ‖)` strictly decreased.
pub fn truncate(ineq: &FlowInequality, y: AttrSet) -> Result<FlowInequality, Error> {
    if ineq.lambda.is_empty() {
        return Err(Error::Domain("truncate needs ‖λ‖ > 0".into()));
    }
    if !get(&ineq.delta, &Pair::unconditional(y)).is_positive() {
        return Err(Error::Domain(format!("truncate needs δ_{{{y}|∅}} > 0")));
    }
    if !verify_witness(ineq) {
        return Err(Error::Domain("truncate needs a valid witness".into()));
    }
    if !is_tight(ineq) {
        return Err(Error::Domain("truncate needs a tight witness".into()));
    }
    let d = ineq.common_denominator();
    let w = Rational::new(BigInt::one(), d.clone());
    let neg_w = -w.clone();
    let mut cur = ineq.clone();

    add_entry(&mut cur.delta, Pair::unconditional(y), &neg_w)?;
    let mut z = y;
    loop {
        if z.is_empty() {
            break;
        }
        if get(&cur.lambda, &z).is_positive() {
            add_entry(&mut cur.lambda, z, &neg_w)?;
            break;
        }
        // (1) a monotonicity entry into Z.
        let c1 = cur
            .mu
            .iter()
            .find(|(p, v)| p.y == z && **v >= w)
            .map(|(p, _)| *p);
        if let Some(p) = c1 {
            add_entry(&mut cur.mu, p, &neg_w)?;
            z = p.x;
            continue;
        }
        // (2) a conditional δ out of Z.
        let c2 = cur
            .delta
            .iter()
            .find(|(p, v)| p.x == z && **v >= w)
            .map(|(p, _)| *p);
        if let Some(p) = c2 {
            add_entry(&mut cur.delta, p, &neg_w)?;
            z = p.y;
            continue;
        }
        // (3) a submodularity at Z: move the deficit to Z∪J, rebalancing
        // J and Z∩J through a fresh monotonicity entry.
        let c3 = cur
            .sigma
            .iter()
            .find(|((i, j), v)| (*i == z || *j == z) && **v >= w)
            .map(|(k, _)| *k);
        if let Some((i, j)) = c3 {
            let other = if i == z { j } else { i };
            add_entry(&mut cur.sigma, (i, j), &neg_w)?;
            add_entry(&mut cur.mu, Pair::new(z.intersect(other), other), &w)?;
            z = z.union(other);
            continue;
        }
        return Err(Error::Internal(format!(
            "tight witness has no draining variable at {z}"
        )));
    }

    // Post-conditions of the truncation lemma, checked exactly.
    debug_assert!(verify_witness(&cur));
    let weighted = |iq: &FlowInequality| -> Rational {
        (norm1(&iq.sigma) * Rational::from_integer(BigInt::from(3))
            + norm1(&iq.delta)
            + norm1(&iq.mu))
            * Rational::from_integer(d.clone())
    };
    let before = weighted(ineq);
    let after = weighted(&cur);
    assert!(
        after <= before - Rational::one(),
        "truncation did not decrease the weighted norm"
    );
    Ok(cur)
}

/// Flow-network construction of a proof sequence.
///
/// Builds the network whose up arcs are the positive `δ_{Y|X}` (capacity
/// `δ_{Y|X}`) and whose down arcs `(Y, X ⊂ Y)` have infinite capacity,
/// then repeatedly pushes `1/D` of flow along a shortest `∅ → B` path for
/// a live target `B` (emitting composition/decomposition steps), or routes
/// through a good submodularity pair when no target is reachable.
pub fn construct_flownet(ineq: &FlowInequality) -> Result<ProofSequence, Error> {
    if !verify_witness(ineq) {
        return Err(Error::Domain(
            "cannot construct a proof sequence from an invalid witness".into(),
        ));
    }
    let d = common_denominator(
        ineq.lambda
            .values()
            .chain(ineq.delta.values())
            .chain(ineq.sigma.values()),
    );
    let w = Rational::new(BigInt::one(), d);
    let neg_w = -w.clone();

    let mut lambda = ineq.lambda.clone();
    let mut delta = ineq.delta.clone();
    let mut sigma = ineq.sigma.clone();
    let mut steps: Vec<ProofStep> = Vec::new();

    // Pre-pass: match unconditional δ mass directly against λ.
    let targets: Vec<AttrSet> = lambda.keys().copied().collect();
    for b in targets {
        let have = get(&delta, &Pair::unconditional(b));
        let need = get(&lambda, &b);
        let t = have.min(need);
        if t.is_positive() {
            add_entry(&mut lambda, b, &-t.clone())?;
            add_entry(&mut delta, Pair::unconditional(b), &-t.clone())?;
        }
    }

    while !lambda.is_empty() {
        // BFS from ∅ over up arcs (positive δ) and down arcs (all proper
        // subsets), neighbors in ascending bitmask order.
        let size = 1usize << ineq.n;
        let mut parent: Vec<Option<u32>> = vec![None; size];
        let mut seen = vec![false; size];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(AttrSet::EMPTY);
        while let Some(u) = queue.pop_front() {
            let mut neighbors = BTreeSet::new();
            for (p, _) in delta.iter() {
                if p.x == u {
                    neighbors.insert(p.y);
                }
            }
            for s in u.subsets() {
                if s != u {
                    neighbors.insert(s);
                }
            }
            for v in neighbors {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    parent[v.index()] = Some(u.bits());
                    queue.push_back(v);
                }
            }
        }

        // Case 1: a live target is reachable.
        let reachable_target = lambda.keys().copied().find(|b| seen[b.index()]);
        if let Some(b) = reachable_target {
            let mut path = vec![b];
            let mut cur = b;
            while let Some(p) = parent[cur.index()] {
                cur = AttrSet::from_bits(p);
                path.push(cur);
            }
            path.reverse();
            debug_assert_eq!(path[0], AttrSet::EMPTY);
            push_flow_along(&path, &mut delta, &mut steps, &w, &neg_w)?;
            add_entry(&mut lambda, b, &neg_w)?;
            continue;
        }

        // Case 2: a good pair (I, J): both reachable, union not, σ > 0.
        let good = sigma
            .keys()
            .copied()
            .find(|(i, j)| seen[i.index()] && seen[j.index()] && !seen[i.union(*j).index()]);
        let Some((i, j)) = good else {
            return Err(Error::Internal(
                "no reachable target and no good pair; witness accounting broken".into(),
            ));
        };
        let mut path = vec![i];
        let mut cur = i;
        while let Some(p) = parent[cur.index()] {
            cur = AttrSet::from_bits(p);
            path.push(cur);
        }
        path.reverse();
        push_flow_along(&path, &mut delta, &mut steps, &w, &neg_w)?;
        let meet = i.intersect(j);
        if !meet.is_empty() {
            steps.push(ProofStep {
                kind: StepKind::Decomposition { y: i, x: meet },
                weight: w.clone(),
            });
        }
        steps.push(ProofStep {
            kind: StepKind::Submodularity { i, j },
            weight: w.clone(),
        });
        add_entry(&mut sigma, (i, j), &neg_w)?;
        add_entry(&mut delta, Pair::new(j, i.union(j)), &w)?;
        if !meet.is_empty() {
            add_entry(&mut delta, Pair::unconditional(meet), &w)?;
        }
    }
    Ok(ProofSequence { steps })
}

/// Pushes `w` units of flow along a path from `∅`, appending the
/// corresponding composition (up arc) and decomposition (down arc) steps
/// and updating the capacities.
fn push_flow_along(
    path: &[AttrSet],
    delta: &mut SparseVec<Pair>,
    steps: &mut Vec<ProofStep>,
    w: &Rational,
    neg_w: &Rational,
) -> Result<(), Error> {
    for k in 1..path.len() {
        let u = path[k - 1];
        let v = path[k];
        if u.is_strict_subset(v) {
            // Up arc: consume capacity δ_{V|U}.
            if !u.is_empty() {
                steps.push(ProofStep {
                    kind: StepKind::Composition { x: u, y: v },
                    weight: w.clone(),
                });
            }
            add_entry(delta, Pair::new(u, v), neg_w)?;
        } else {
            debug_assert!(v.is_strict_subset(u), "path arcs are up or down");
            steps.push(ProofStep {
                kind: StepKind::Decomposition { y: u, x: v },
                weight: w.clone(),
            });
            add_entry(delta, Pair::new(v, u), w)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn s(vars: &[usize]) -> AttrSet {
        AttrSet::from_iter(vars.iter().copied())
    }

    /// λ = ½ on {0,1,2} and {1,2,3}; δ = ½ on the three body supports
    /// {0,1}, {1,2}, {2,3}.
    fn two_path_inequality() -> FlowInequality {
        let mut lambda = SparseVec::new();
        lambda.insert(s(&[0, 1, 2]), rat(1, 2));
        lambda.insert(s(&[1, 2, 3]), rat(1, 2));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 1])), rat(1, 2));
        delta.insert(Pair::unconditional(s(&[1, 2])), rat(1, 2));
        delta.insert(Pair::unconditional(s(&[2, 3])), rat(1, 2));
        // Witness: σ on ({0,1},{2}) and ({1,2},{2,3}); the inflow balance
        // is exact everywhere except the two targets.
        let mut sigma = SparseVec::new();
        sigma.insert((s(&[0, 1]), s(&[2])), rat(1, 2));
        sigma.insert((s(&[1, 2]), s(&[2, 3])), rat(1, 2));
        FlowInequality::new(4, lambda, delta, sigma, SparseVec::new())
    }

    #[test]
    fn inflow_basics() {
        // All-zero vectors: inflow is 0 everywhere.
        let zero = FlowInequality::new(
            3,
            SparseVec::new(),
            SparseVec::new(),
            SparseVec::new(),
            SparseVec::new(),
        );
        assert!(zero.inflow_all().iter().all(|v| v.is_zero()));

        // A single unconditional δ: inflow 1 at its set, 0 elsewhere.
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 2])), rat_int(1));
        let one = FlowInequality::new(3, SparseVec::new(), delta, SparseVec::new(), SparseVec::new());
        let inflow = one.inflow_all();
        for z in 1usize..8 {
            let expect = if z == s(&[0, 2]).index() { rat_int(1) } else { rat_int(0) };
            assert_eq!(inflow[z], expect, "at {z}");
        }
        assert!(one.inflow(AttrSet::EMPTY).is_err());
    }

    #[test]
    fn witness_verification_and_tightening() {
        let zero = FlowInequality::new(
            3,
            SparseVec::new(),
            SparseVec::new(),
            SparseVec::new(),
            SparseVec::new(),
        );
        assert!(verify_witness(&zero));
        assert!(is_tight(&zero));

        let ineq = two_path_inequality();
        assert!(verify_witness(&ineq));
        let tight = tighten_witness(&ineq).unwrap();
        assert!(is_tight(&tight));

        // A negative σ entry is structurally invalid.
        let mut bad = ineq.clone();
        bad.sigma.insert((s(&[0]), s(&[1])), rat_int(-1));
        assert!(!verify_witness(&bad));
    }

    #[test]
    fn worked_proof_sequence_replays() {
        // The five-step derivation for the two-path rule at weight ½:
        // submodularity, decomposition, submodularity, two compositions.
        let ineq = two_path_inequality();
        let w = rat(1, 2);
        let seq = ProofSequence {
            steps: vec![
                ProofStep {
                    kind: StepKind::Submodularity { i: s(&[0, 1]), j: s(&[2]) },
                    weight: w.clone(),
                },
                ProofStep {
                    kind: StepKind::Decomposition { y: s(&[2, 3]), x: s(&[2]) },
                    weight: w.clone(),
                },
                ProofStep {
                    kind: StepKind::Submodularity { i: s(&[2, 3]), j: s(&[1, 2]) },
                    weight: w.clone(),
                },
                ProofStep {
                    kind: StepKind::Composition { x: s(&[2]), y: s(&[0, 1, 2]) },
                    weight: w.clone(),
                },
                ProofStep {
                    kind: StepKind::Composition { x: s(&[1, 2]), y: s(&[1, 2, 3]) },
                    weight: w.clone(),
                },
            ],
        };
        assert_eq!(verify_proof_sequence(&ineq, &seq), ProofCheck::Valid);
    }

    #[test]
    fn empty_sequence_is_valid_iff_delta_dominates() {
        let mut lambda = SparseVec::new();
        lambda.insert(s(&[0, 1]), rat_int(1));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 1])), rat_int(1));
        let ineq = FlowInequality::new(2, lambda, delta, SparseVec::new(), SparseVec::new());
        let empty = ProofSequence::default();
        assert_eq!(verify_proof_sequence(&ineq, &empty), ProofCheck::Valid);

        let mut starved = ineq.clone();
        starved.delta.clear();
        assert_eq!(
            verify_proof_sequence(&starved, &empty),
            ProofCheck::FinalNotDominating
        );
    }

    #[test]
    fn composition_without_budget_fails() {
        // A composition step whose δ_{X|∅} budget is zero is invalid at
        // that index.
        let mut delta = SparseVec::new();
        delta.insert(Pair::new(s(&[0]), s(&[0, 1])), rat_int(1));
        let ineq = FlowInequality::new(2, SparseVec::new(), delta, SparseVec::new(), SparseVec::new());
        let seq = ProofSequence {
            steps: vec![ProofStep {
                kind: StepKind::Composition { x: s(&[0]), y: s(&[0, 1]) },
                weight: rat_int(1),
            }],
        };
        assert_eq!(verify_proof_sequence(&ineq, &seq), ProofCheck::NegativeAt(0));
    }

    #[test]
    fn inductive_construction_on_worked_example() {
        let ineq = two_path_inequality();
        let seq = construct_inductive(&ineq).unwrap();
        assert_eq!(verify_proof_sequence(&ineq, &seq), ProofCheck::Valid);
        // Length bound: D(3‖σ‖ + ‖δ‖ + ‖μ‖) with D = 2.
        assert!(seq.len() <= 2 * (3 + 2 + 1));
    }

    #[test]
    fn inductive_base_cases() {
        // λ = δ on a single coordinate: consumed without emitting steps.
        let mut lambda = SparseVec::new();
        lambda.insert(s(&[0, 1]), rat_int(1));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 1])), rat_int(1));
        let ineq = FlowInequality::new(2, lambda, delta, SparseVec::new(), SparseVec::new());
        assert!(construct_inductive(&ineq).unwrap().is_empty());

        // λ = 0: empty sequence.
        let zero = FlowInequality::new(
            2,
            SparseVec::new(),
            SparseVec::new(),
            SparseVec::new(),
            SparseVec::new(),
        );
        assert!(construct_inductive(&zero).unwrap().is_empty());
    }

    #[test]
    fn flownet_construction_on_worked_example() {
        let ineq = two_path_inequality();
        let seq = construct_flownet(&ineq).unwrap();
        assert_eq!(verify_proof_sequence(&ineq, &seq), ProofCheck::Valid);
        // Length bound: 2^n · D · (‖λ‖ + ‖σ‖).
        assert!(seq.len() <= 16 * 2 * 2);
    }

    #[test]
    fn flownet_base_case() {
        let mut lambda = SparseVec::new();
        lambda.insert(s(&[0, 1]), rat_int(1));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 1])), rat_int(1));
        let ineq = FlowInequality::new(2, lambda, delta, SparseVec::new(), SparseVec::new());
        assert!(construct_flownet(&ineq).unwrap().is_empty());
    }

    #[test]
    fn flownet_routes_through_good_pair() {
        // λ on {0,1,2} can only be reached via the submodularity
        // ({0,1},{1,2}): δ has the two edges, σ carries the pair.
        let mut lambda = SparseVec::new();
        lambda.insert(s(&[0, 1, 2]), rat_int(1));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 1])), rat_int(1));
        delta.insert(Pair::unconditional(s(&[1, 2])), rat_int(1));
        let mut sigma = SparseVec::new();
        sigma.insert((s(&[0, 1]), s(&[1, 2])), rat_int(1));
        let ineq = FlowInequality::new(3, lambda, delta, sigma, SparseVec::new());
        assert!(verify_witness(&ineq));
        let seq = construct_flownet(&ineq).unwrap();
        assert_eq!(verify_proof_sequence(&ineq, &seq), ProofCheck::Valid);
        let has_decomp = seq
            .steps
            .iter()
            .any(|st| matches!(st.kind, StepKind::Decomposition { .. }));
        let has_sub = seq
            .steps
            .iter()
            .any(|st| matches!(st.kind, StepKind::Submodularity { .. }));
        assert!(has_decomp && has_sub, "expected the decomp+sub pair:\n{}", seq.to_text());
    }

    #[test]
    fn truncate_worked_example() {
        let ineq = tighten_witness(&two_path_inequality()).unwrap();
        let y = s(&[0, 1]);
        let out = truncate(&ineq, y).unwrap();
        assert!(verify_witness(&out));
        // (b) componentwise decrease.
        for (p, v) in &out.delta {
            assert!(*v <= get(&ineq.delta, p));
        }
        for (b, v) in &out.lambda {
            assert!(*v <= get(&ineq.lambda, b));
        }
        // (c) norms.
        let w = rat(1, 2);
        assert!(norm1(&out.lambda) >= norm1(&ineq.lambda) - &w);
        assert!(
            get(&out.delta, &Pair::unconditional(y))
                <= get(&ineq.delta, &Pair::unconditional(y)) - &w
        );
    }

    #[test]
    fn truncate_direct_hit() {
        // λ_Y > 0 and δ_{Y|∅} > 0: both reduced by 1/D, everything else
        // unchanged.
        let mut lambda = SparseVec::new();
        lambda.insert(s(&[0, 1]), rat_int(1));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(s(&[0, 1])), rat_int(2));
        let ineq = FlowInequality::new(2, lambda, delta, SparseVec::new(), SparseVec::new());
        let tight = tighten_witness(&ineq).unwrap();
        let out = truncate(&tight, s(&[0, 1])).unwrap();
        assert_eq!(get(&out.lambda, &s(&[0, 1])), rat_int(0));
        assert_eq!(get(&out.delta, &Pair::unconditional(s(&[0, 1]))), rat_int(1));
    }

    #[test]
    fn truncate_through_mu_edge() {
        // Deficit resolved via a monotonicity entry: δ_{Y|∅} feeds
        // inflow(Y); the walk consumes μ_{X,Y} and moves the deficit to X,
        // where a λ weight absorbs it.
        let y = s(&[0, 1, 2]);
        let x = s(&[0]);
        let mut lambda = SparseVec::new();
        lambda.insert(x, rat_int(1));
        let mut delta = SparseVec::new();
        delta.insert(Pair::unconditional(y), rat_int(1));
        let mut mu = SparseVec::new();
        mu.insert(Pair::new(x, y), rat_int(1));
        let ineq = FlowInequality::new(3, lambda, delta, SparseVec::new(), mu);
        let tight = tighten_witness(&ineq).unwrap();
        let out = truncate(&tight, y).unwrap();
        assert_eq!(get(&out.mu, &Pair::new(x, y)), rat_int(0));
        assert_eq!(get(&out.lambda, &x), rat_int(0));
        assert!(verify_witness(&out));
    }

    #[test]
    fn step_vectors_against_polymatroids() {
        // Every step kind evaluates ≤ 0 on the cardinality polymatroid.
        let n = 4;
        let h: Vec<Rational> = (0..(1u32 << n))
            .map(|z| rat_int(z.count_ones() as i64))
            .collect();
        let steps = [
            StepKind::Submodularity { i: s(&[0, 1]), j: s(&[1, 2]) },
            StepKind::Submodularity { i: s(&[0]), j: s(&[3]) },
            StepKind::Monotonicity { x: s(&[0]), y: s(&[0, 1]) },
            StepKind::Monotonicity { x: AttrSet::EMPTY, y: s(&[2]) },
            StepKind::Composition { x: s(&[0]), y: s(&[0, 3]) },
            StepKind::Decomposition { y: s(&[0, 3]), x: s(&[0]) },
        ];
        for k in steps {
            assert!(k.eval(&h) <= rat_int(0), "step {k} has positive value");
        }
    }

    #[test]
    fn sequence_serialization() {
        let seq = ProofSequence {
            steps: vec![
                ProofStep {
                    kind: StepKind::Submodularity { i: s(&[0, 1]), j: s(&[2]) },
                    weight: rat(1, 2),
                },
                ProofStep {
                    kind: StepKind::Monotonicity { x: AttrSet::EMPTY, y: s(&[1]) },
                    weight: rat_int(1),
                },
            ],
        };
        assert_eq!(seq.to_text(), "sub 0,1 2 1/2\nmono - 1 1\n");
    }
}
