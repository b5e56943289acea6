//! Degree constraints, hypergraphs, disjunctive rules and the generating
//! sets of the polymatroid cone.

use crate::attrset::{AttrSet, MAX_VARS};
use crate::error::Error;
use crate::rational::{log2_dyadic, LogQuantity, Rational, DEFAULT_FRAC_BITS};
use num_traits::Zero;
use std::fmt;

/// Identifier of a relation occurrence (one per body atom; multihyperedges
/// get distinct ids even when their supports coincide).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RelId(pub usize);

impl fmt::Display for RelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.0)
    }
}

/// A degree constraint `(X, Y, N_{Y|X})`: in the guard relation, every
/// `X`-tuple has at most `N_{Y|X}` distinct `Y`-extensions.
///
/// Cardinality constraints have `X = ∅`; functional dependencies have
/// `log_bound = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DegreeConstraint {
    pub x: AttrSet,
    pub y: AttrSet,
    /// `log2` of the bound, in bits. Rounded up to dyadic precision when the
    /// bound came from a raw count that is not a power of two.
    pub log_bound: LogQuantity,
    /// The raw count, when the constraint came from one.
    pub raw_bound: Option<u64>,
    /// The relation that guards this constraint, when known.
    pub guard: Option<RelId>,
}

impl DegreeConstraint {
    /// Constraint from a raw tuple/extension count.
    pub fn from_count(
        x: AttrSet,
        y: AttrSet,
        count: u64,
        guard: Option<RelId>,
    ) -> Result<DegreeConstraint, Error> {
        if !x.is_strict_subset(y) {
            return Err(Error::Domain(format!(
                "degree constraint needs X ⊂ Y, got X={x}, Y={y}"
            )));
        }
        Ok(DegreeConstraint {
            x,
            y,
            log_bound: log2_dyadic(count, DEFAULT_FRAC_BITS)?,
            raw_bound: Some(count),
            guard,
        })
    }

    /// Constraint with a directly specified log-scale bound.
    pub fn from_log(
        x: AttrSet,
        y: AttrSet,
        log_bound: Rational,
        guard: Option<RelId>,
    ) -> Result<DegreeConstraint, Error> {
        if !x.is_strict_subset(y) {
            return Err(Error::Domain(format!(
                "degree constraint needs X ⊂ Y, got X={x}, Y={y}"
            )));
        }
        if log_bound < Rational::zero() {
            return Err(Error::Domain("negative log bound".into()));
        }
        Ok(DegreeConstraint {
            x,
            y,
            log_bound: LogQuantity(log_bound),
            raw_bound: None,
            guard,
        })
    }

    /// A functional dependency `X → Y` (realized as `(X, X∪Y, 1)`).
    pub fn functional_dependency(
        x: AttrSet,
        y: AttrSet,
        guard: Option<RelId>,
    ) -> Result<DegreeConstraint, Error> {
        DegreeConstraint::from_count(x, x.union(y), 1, guard)
    }

    /// A cardinality constraint `|R| <= count` on support `y`.
    pub fn cardinality(y: AttrSet, count: u64, guard: Option<RelId>) -> Result<DegreeConstraint, Error> {
        DegreeConstraint::from_count(AttrSet::EMPTY, y, count, guard)
    }

    pub fn is_cardinality(&self) -> bool {
        self.x.is_empty()
    }
}

/// A multi-hypergraph over `[n]`: one edge per body atom.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<(AttrSet, RelId)>,
}

impl Hypergraph {
    pub fn new(n: usize, supports: Vec<AttrSet>) -> Hypergraph {
        let edges = supports
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, RelId(i)))
            .collect();
        Hypergraph { n, edges }
    }

    pub fn support_of(&self, id: RelId) -> Option<AttrSet> {
        self.edges.iter().find(|(_, r)| *r == id).map(|(s, _)| *s)
    }

    /// Union of all edge supports.
    pub fn covered_vars(&self) -> AttrSet {
        self.edges
            .iter()
            .fold(AttrSet::EMPTY, |acc, (s, _)| acc.union(*s))
    }
}

/// A disjunctive datalog rule: body hypergraph, nonempty target list, and
/// the degree constraints the input data is declared to satisfy.
///
/// A full conjunctive query is the special case with the single target
/// `[n]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DisjunctiveRule {
    pub hypergraph: Hypergraph,
    pub targets: Vec<AttrSet>,
    pub constraints: Vec<DegreeConstraint>,
}

impl DisjunctiveRule {
    pub fn n(&self) -> usize {
        self.hypergraph.n
    }

    /// Rule for a full conjunctive query over the same body.
    pub fn full_query(hypergraph: Hypergraph, constraints: Vec<DegreeConstraint>) -> DisjunctiveRule {
        let full = AttrSet::full(hypergraph.n);
        DisjunctiveRule {
            hypergraph,
            targets: vec![full],
            constraints,
        }
    }

    /// The same body and constraints with a different target list.
    pub fn with_targets(&self, targets: Vec<AttrSet>) -> DisjunctiveRule {
        DisjunctiveRule {
            hypergraph: self.hypergraph.clone(),
            targets,
            constraints: self.constraints.clone(),
        }
    }
}

/// Which cone of set functions a bound ranges over.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FunctionClass {
    /// Non-negative modular functions.
    Modular,
    /// Polymatroids: non-negative, monotone, submodular.
    Polymatroid,
    /// Non-negative, monotone, subadditive functions.
    Subadditive,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionClass::Modular => write!(f, "modular"),
            FunctionClass::Polymatroid => write!(f, "polymatroid"),
            FunctionClass::Subadditive => write!(f, "subadditive"),
        }
    }
}

/// A structural problem found in a rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic(pub String);

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Structural validation of a rule: guard structure, variable coverage, and
/// universe fit. Returns an empty list iff the rule is well-formed.
pub fn validate_rule(rule: &DisjunctiveRule) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = rule.n();
    if n == 0 || n > MAX_VARS {
        out.push(Diagnostic(format!("universe size {n} out of range 1..={MAX_VARS}")));
        return out;
    }
    let full = AttrSet::full(n);
    for (support, id) in &rule.hypergraph.edges {
        if support.is_empty() {
            out.push(Diagnostic(format!("edge {id} has empty support")));
        }
        if !support.fits_universe(n) {
            out.push(Diagnostic(format!("edge {id} support {support} exceeds universe")));
        }
    }
    let covered = rule.hypergraph.covered_vars();
    if covered != full {
        let missing = full.difference(covered);
        out.push(Diagnostic(format!("variables {missing} appear in no edge")));
    }
    if rule.targets.is_empty() {
        out.push(Diagnostic("rule has no targets".into()));
    }
    for b in &rule.targets {
        if b.is_empty() {
            out.push(Diagnostic("empty target set".into()));
        }
        if !b.fits_universe(n) {
            out.push(Diagnostic(format!("target {b} exceeds universe")));
        }
    }
    for c in &rule.constraints {
        if !c.x.is_strict_subset(c.y) {
            out.push(Diagnostic(format!(
                "constraint ({}, {}) does not satisfy X ⊂ Y",
                c.x, c.y
            )));
            continue;
        }
        if !c.y.fits_universe(n) {
            out.push(Diagnostic(format!("constraint set {} exceeds universe", c.y)));
        }
        let guarded = match c.guard {
            Some(id) => rule
                .hypergraph
                .support_of(id)
                .is_some_and(|s| c.y.is_subset(s)),
            None => rule
                .hypergraph
                .edges
                .iter()
                .any(|(s, _)| c.y.is_subset(*s)),
        };
        if !guarded {
            out.push(Diagnostic(format!(
                "unguarded constraint: no body edge contains {}",
                c.y
            )));
        }
    }
    out
}

/// Generating set for the polymatroid cone `Γ_n` over variables with
/// `h(∅) = 0`:
///
/// * elementary submodular pairs `(Y∪{i}, Y∪{j})` for `i ≠ j`,
///   `Y ⊆ [n]\{i,j}`, unordered;
/// * elementary monotone pairs `([n]\{i}, [n])`.
///
/// Imposing these as inequalities implies full monotonicity and
/// submodularity (checked by brute force in the tests).
pub fn elementary_generators(
    n: usize,
) -> Result<(Vec<(AttrSet, AttrSet)>, Vec<(AttrSet, AttrSet)>), Error> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::Domain(format!("universe size {n} out of range")));
    }
    let mut submodular = Vec::new();
    let full = AttrSet::full(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let rest = full.remove(i).remove(j);
            for y in rest.subsets() {
                submodular.push((y.insert(i), y.insert(j)));
            }
        }
    }
    submodular.sort();
    let monotone = (0..n).map(|i| (full.remove(i), full)).collect();
    Ok((submodular, monotone))
}
