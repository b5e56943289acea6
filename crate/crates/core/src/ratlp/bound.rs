//! Construction and exact solving of the polymatroid-style bound linear
//! programs, producing primal optima together with dual certificates.
//!
//! Variables are `h(Z)` for nonempty `Z ⊆ [n]` (`h(∅)` is eliminated rather
//! than constrained); the modular class substitutes `h(Z) = Σ_{v∈Z} h({v})`
//! and shrinks to `n` variables. Cone rows come from generating sets: the
//! elementary submodular/monotone generators for polymatroids, incomparable
//! pairs plus single-element-removal monotonicity for subadditive
//! functions. The solver adds cone rows lazily: it solves a restricted
//! program, scans the generating set for violated rows, and repeats. Dual
//! values of rows never added are zero, so the restricted dual certificate
//! is a certificate for the full program.

use crate::attrset::AttrSet;
use crate::error::Error;
use crate::rational::{rat_int, Rational};
use crate::ratlp::simplex::{simplex_solve, LinearProgram, LpStatus, Sense};
use crate::rule::{DisjunctiveRule, FunctionClass};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Largest universe for which bound LPs are built (dense `2^n` tables).
pub const MAX_LP_VARS: usize = 12;

/// What a row of a bound LP stands for.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RowTag {
    /// Degree constraint row `h(Y) - h(X) <= n_{Y|X}`; index into the
    /// rule's constraint list.
    Degree(usize),
    /// Elementary submodularity `h(I∪J) + h(I∩J) <= h(I) + h(J)`.
    Submodular(AttrSet, AttrSet),
    /// Subadditivity `h(I∪J) <= h(I) + h(J)` for incomparable `I, J`.
    Subadditive(AttrSet, AttrSet),
    /// Monotonicity `h(X) <= h(Y)`, `X ⊂ Y`.
    Monotone(AttrSet, AttrSet),
    /// Maximin linkage `w <= h(B)` for target `B`.
    Target(AttrSet),
}

/// A bound LP plus the meaning of each row.
#[derive(Clone, Debug)]
pub struct BoundLp {
    pub class: FunctionClass,
    pub n: usize,
    pub lp: LinearProgram,
    pub tags: Vec<RowTag>,
    /// Present iff the LP carries the extra maximin variable `w`.
    pub maximin: bool,
}

fn num_h_vars(class: FunctionClass, n: usize) -> usize {
    match class {
        FunctionClass::Modular => n,
        _ => (1usize << n) - 1,
    }
}

/// Coefficients of `h(Z)` expanded into LP variables (empty for `Z = ∅`).
fn h_coeffs(class: FunctionClass, z: AttrSet, sign: i64, out: &mut Vec<(usize, Rational)>) {
    if z.is_empty() {
        return;
    }
    match class {
        FunctionClass::Modular => {
            for v in z.iter() {
                out.push((v, rat_int(sign)));
            }
        }
        _ => out.push((z.index() - 1, rat_int(sign))),
    }
}

fn row_for_tag(class: FunctionClass, tag: &RowTag) -> Vec<(usize, Rational)> {
    let mut coeffs = Vec::new();
    match tag {
        RowTag::Degree(_) => unreachable!("degree rows are built from the rule"),
        RowTag::Submodular(i, j) => {
            h_coeffs(class, i.union(*j), 1, &mut coeffs);
            h_coeffs(class, i.intersect(*j), 1, &mut coeffs);
            h_coeffs(class, *i, -1, &mut coeffs);
            h_coeffs(class, *j, -1, &mut coeffs);
        }
        RowTag::Subadditive(i, j) => {
            h_coeffs(class, i.union(*j), 1, &mut coeffs);
            h_coeffs(class, *i, -1, &mut coeffs);
            h_coeffs(class, *j, -1, &mut coeffs);
        }
        RowTag::Monotone(x, y) => {
            h_coeffs(class, *x, 1, &mut coeffs);
            h_coeffs(class, *y, -1, &mut coeffs);
        }
        RowTag::Target(_) => unreachable!("target rows are built separately"),
    }
    coeffs
}

/// The cone generators for a class, in deterministic order.
fn cone_generators(class: FunctionClass, n: usize) -> Vec<RowTag> {
    match class {
        FunctionClass::Modular => Vec::new(),
        FunctionClass::Polymatroid => {
            let (sub, mono) = crate::rule::elementary_generators(n).expect("n validated");
            sub.into_iter()
                .map(|(i, j)| RowTag::Submodular(i, j))
                .chain(mono.into_iter().map(|(x, y)| RowTag::Monotone(x, y)))
                .collect()
        }
        FunctionClass::Subadditive => {
            let mut tags = Vec::new();
            let full = AttrSet::full(n);
            for i in full.subsets() {
                for j in full.subsets() {
                    if i < j && i.is_incomparable(j) {
                        tags.push(RowTag::Subadditive(i, j));
                    }
                }
            }
            // Single-element removals generate full monotonicity by
            // chaining.
            for y in full.subsets() {
                if y.len() >= 2 {
                    for v in y.iter() {
                        tags.push(RowTag::Monotone(y.remove(v), y));
                    }
                }
            }
            tags
        }
    }
}

fn check_size(rule: &DisjunctiveRule) -> Result<usize, Error> {
    let n = rule.n();
    if n == 0 || n > MAX_LP_VARS {
        return Err(Error::TooLarge(format!(
            "bound LPs support 1..={MAX_LP_VARS} variables, got {n}"
        )));
    }
    Ok(n)
}

fn degree_rows(
    class: FunctionClass,
    rule: &DisjunctiveRule,
    lp: &mut LinearProgram,
    tags: &mut Vec<RowTag>,
) {
    for (idx, c) in rule.constraints.iter().enumerate() {
        let mut coeffs = Vec::new();
        h_coeffs(class, c.y, 1, &mut coeffs);
        h_coeffs(class, c.x, -1, &mut coeffs);
        lp.add_row(coeffs, Sense::Le, c.log_bound.bits().clone());
        tags.push(RowTag::Degree(idx));
    }
}

/// Builds the bound LP with a fixed linear objective `Σ λ_B h(B)` and the
/// full generating row set for the class.
pub fn build_bound_lp(
    class: FunctionClass,
    rule: &DisjunctiveRule,
    lambda: &[(AttrSet, Rational)],
) -> Result<BoundLp, Error> {
    let n = check_size(rule)?;
    let mut lp = LinearProgram::new(num_h_vars(class, n), true);
    let mut tags = Vec::new();
    degree_rows(class, rule, &mut lp, &mut tags);
    for tag in cone_generators(class, n) {
        let coeffs = row_for_tag(class, &tag);
        lp.add_row(coeffs, Sense::Le, Rational::zero());
        tags.push(tag);
    }
    let mut objective = Vec::new();
    for (b, w) in lambda {
        let mut coeffs = Vec::new();
        h_coeffs(class, *b, 1, &mut coeffs);
        for (v, c) in coeffs {
            objective.push((v, c * w));
        }
    }
    lp.objective = objective;
    Ok(BoundLp {
        class,
        n,
        lp,
        tags,
        maximin: false,
    })
}

/// Maximin form: `max w` subject to `w <= h(B)` per target plus the bound
/// constraints; the dual values of the target rows recover the weight
/// vector `λ`.
pub fn build_maximin_lp(class: FunctionClass, rule: &DisjunctiveRule) -> Result<BoundLp, Error> {
    let mut built = build_bound_lp(class, rule, &[])?;
    let w_var = built.lp.num_vars;
    built.lp.num_vars += 1;
    for b in &rule.targets {
        let mut coeffs = vec![(w_var, Rational::one())];
        h_coeffs(class, *b, -1, &mut coeffs);
        built.lp.add_row(coeffs, Sense::Le, Rational::zero());
        built.tags.push(RowTag::Target(*b));
    }
    built.lp.objective = vec![(w_var, Rational::one())];
    built.maximin = true;
    Ok(built)
}

/// A solved bound LP with its dual certificate split by row meaning.
#[derive(Clone, Debug)]
pub struct SolvedBound {
    pub class: FunctionClass,
    pub n: usize,
    pub objective: Rational,
    /// Dense optimal set function over `2^n` (modular solutions expanded).
    pub h: Vec<Rational>,
    /// Target weights: the input `λ` for fixed-objective solves, the target
    /// rows' dual values for maximin solves.
    pub lambda: Vec<(AttrSet, Rational)>,
    /// Dual value per constraint index (degree rows).
    pub delta_by_constraint: Vec<Rational>,
    /// Dual values of submodularity/subadditivity rows, keyed by the
    /// unordered pair.
    pub sigma: BTreeMap<(AttrSet, AttrSet), Rational>,
    /// Dual values of monotonicity rows, keyed `(X, Y)`.
    pub mu: BTreeMap<(AttrSet, AttrSet), Rational>,
    /// True when a maximin solve hit objective zero (degenerate rule); the
    /// reported `lambda` is then the uniform vector.
    pub degenerate: bool,
}

impl SolvedBound {
    /// Dual degree weights aggregated by `(X, Y)` pair.
    pub fn delta_by_pair(&self, rule: &DisjunctiveRule) -> BTreeMap<(AttrSet, AttrSet), Rational> {
        let mut out = BTreeMap::new();
        for (idx, v) in self.delta_by_constraint.iter().enumerate() {
            if !v.is_zero() {
                let c = &rule.constraints[idx];
                *out.entry((c.x, c.y)).or_insert_with(Rational::zero) += v;
            }
        }
        out
    }
}

enum BoundObjective<'a> {
    FixedLambda(&'a [(AttrSet, Rational)]),
    Maximin,
}

/// Solves a bound LP exactly with lazy cone-row generation.
pub fn solve_fixed_lambda(
    class: FunctionClass,
    rule: &DisjunctiveRule,
    lambda: &[(AttrSet, Rational)],
) -> Result<SolvedBound, Error> {
    solve_bound(class, rule, BoundObjective::FixedLambda(lambda))
}

/// Solves the maximin bound LP (`max min_B h(B)`) exactly, recovering `λ`
/// from the target rows' duals.
pub fn solve_maximin(class: FunctionClass, rule: &DisjunctiveRule) -> Result<SolvedBound, Error> {
    solve_bound(class, rule, BoundObjective::Maximin)
}

fn solve_bound(
    class: FunctionClass,
    rule: &DisjunctiveRule,
    objective: BoundObjective<'_>,
) -> Result<SolvedBound, Error> {
    let n = check_size(rule)?;
    let nh = num_h_vars(class, n);
    let maximin = matches!(objective, BoundObjective::Maximin);
    let num_vars = nh + usize::from(maximin);

    let mut lp = LinearProgram::new(num_vars, true);
    let mut tags = Vec::new();
    degree_rows(class, rule, &mut lp, &mut tags);
    match &objective {
        BoundObjective::FixedLambda(lambda) => {
            let mut obj = Vec::new();
            for (b, w) in lambda.iter() {
                let mut coeffs = Vec::new();
                h_coeffs(class, *b, 1, &mut coeffs);
                for (v, c) in coeffs {
                    obj.push((v, c * w));
                }
            }
            lp.objective = obj;
        }
        BoundObjective::Maximin => {
            for b in &rule.targets {
                let mut coeffs = vec![(nh, Rational::one())];
                h_coeffs(class, *b, -1, &mut coeffs);
                lp.add_row(coeffs, Sense::Le, Rational::zero());
                tags.push(RowTag::Target(*b));
            }
            lp.objective = vec![(nh, Rational::one())];
        }
    }

    let generators = cone_generators(class, n);
    let mut active: Vec<bool> = vec![false; generators.len()];

    // Violation of generator row at a point (rows have rhs 0): positive
    // means violated.
    let eval_row = |tag: &RowTag, point: &[Rational]| -> Rational {
        row_for_tag(class, tag)
            .into_iter()
            .map(|(v, c)| c * &point[v])
            .sum()
    };

    const MAX_ROUNDS: usize = 4096;
    const BATCH: usize = 64;
    let mut sol = None;
    for _round in 0..MAX_ROUNDS {
        let s = simplex_solve(&lp);
        let point: Vec<Rational> = match s.status {
            LpStatus::Infeasible => {
                return Err(Error::DegenerateLp(
                    "bound LP infeasible (non-negative bounds cannot be)".into(),
                ))
            }
            LpStatus::Unbounded => s.ray.clone().expect("ray at unbounded"),
            LpStatus::Optimal => s.primal.clone(),
        };
        let mut violated: Vec<(usize, Rational)> = Vec::new();
        for (gi, tag) in generators.iter().enumerate() {
            if active[gi] {
                continue;
            }
            let v = eval_row(tag, &point);
            if v.is_positive() {
                violated.push((gi, v));
            }
        }
        if violated.is_empty() {
            match s.status {
                LpStatus::Unbounded => {
                    return Err(Error::DegenerateLp(
                        "bound LP unbounded: some variable is unconstrained".into(),
                    ))
                }
                LpStatus::Optimal => {
                    sol = Some(s);
                    break;
                }
                LpStatus::Infeasible => unreachable!(),
            }
        } else {
            violated.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            for (gi, _) in violated.into_iter().take(BATCH) {
                active[gi] = true;
                let tag = generators[gi].clone();
                lp.add_row(row_for_tag(class, &tag), Sense::Le, Rational::zero());
                tags.push(tag);
            }
        }
    }
    let sol = sol.ok_or_else(|| Error::Internal("row generation did not converge".into()))?;

    // Expand the optimal point to a dense set function over 2^n.
    let mut h = vec![Rational::zero(); 1 << n];
    for z in 1usize..(1 << n) {
        h[z] = match class {
            FunctionClass::Modular => AttrSet::from_bits(z as u32)
                .iter()
                .map(|v| sol.primal[v].clone())
                .sum(),
            _ => sol.primal[z - 1].clone(),
        };
    }

    let mut delta_by_constraint = vec![Rational::zero(); rule.constraints.len()];
    let mut sigma = BTreeMap::new();
    let mut mu = BTreeMap::new();
    let mut lambda_dual: Vec<(AttrSet, Rational)> = Vec::new();
    for (tag, y) in tags.iter().zip(&sol.dual) {
        if y.is_zero() {
            continue;
        }
        match tag {
            RowTag::Degree(idx) => delta_by_constraint[*idx] += y,
            RowTag::Submodular(i, j) | RowTag::Subadditive(i, j) => {
                *sigma.entry((*i, *j)).or_insert_with(Rational::zero) += y;
            }
            RowTag::Monotone(x, yy) => {
                *mu.entry((*x, *yy)).or_insert_with(Rational::zero) += y;
            }
            RowTag::Target(b) => lambda_dual.push((*b, y.clone())),
        }
    }

    let mut degenerate = false;
    let lambda = match objective {
        BoundObjective::FixedLambda(lambda) => lambda.to_vec(),
        BoundObjective::Maximin => {
            let total: Rational = lambda_dual.iter().map(|(_, w)| w.clone()).sum();
            if sol.objective.is_zero() {
                // Zero optimum: the target-row duals still certify it, but
                // only up to scale (dual feasibility gives Σz ≥ 1, not
                // equality). Normalize the whole certificate so ‖λ‖₁ = 1.
                degenerate = true;
                if !total.is_positive() {
                    return Err(Error::Internal(
                        "degenerate maximin with zero dual target weights".into(),
                    ));
                }
                for w in delta_by_constraint.iter_mut() {
                    *w /= &total;
                }
                for w in sigma.values_mut() {
                    *w /= &total;
                }
                for w in mu.values_mut() {
                    *w /= &total;
                }
                lambda_dual
                    .into_iter()
                    .map(|(b, w)| (b, w / &total))
                    .collect()
            } else {
                if total != Rational::one() {
                    return Err(Error::Internal(format!(
                        "maximin dual weights sum to {total}, expected 1"
                    )));
                }
                lambda_dual
            }
        }
    };

    Ok(SolvedBound {
        class,
        n,
        objective: sol.objective,
        h,
        lambda,
        delta_by_constraint,
        sigma,
        mu,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::rule::{DegreeConstraint, Hypergraph};

    fn cycle_rule(n: usize, size: u64) -> DisjunctiveRule {
        let edges: Vec<AttrSet> = (0..n)
            .map(|i| AttrSet::from_iter([i, (i + 1) % n]))
            .collect();
        let h = Hypergraph::new(n, edges);
        let constraints = h
            .edges
            .iter()
            .map(|(s, id)| DegreeConstraint::cardinality(*s, size, Some(*id)).unwrap())
            .collect();
        DisjunctiveRule::full_query(h, constraints)
    }

    #[test]
    fn four_cycle_polymatroid_bound_is_two() {
        let rule = cycle_rule(4, 2); // log N = 1
        let full = AttrSet::full(4);
        let solved =
            solve_fixed_lambda(FunctionClass::Polymatroid, &rule, &[(full, rat_int(1))]).unwrap();
        assert_eq!(solved.objective, rat_int(2));
    }

    #[test]
    fn four_cycle_with_fds_is_three_halves() {
        let mut rule = cycle_rule(4, 2);
        let r12 = rule.hypergraph.edges[0].1;
        let a1 = AttrSet::singleton(0);
        let a2 = AttrSet::singleton(1);
        let a12 = AttrSet::from_iter([0, 1]);
        rule.constraints
            .push(DegreeConstraint::from_count(a1, a12, 1, Some(r12)).unwrap());
        rule.constraints
            .push(DegreeConstraint::from_count(a2, a12, 1, Some(r12)).unwrap());
        let solved = solve_maximin(FunctionClass::Polymatroid, &rule).unwrap();
        assert_eq!(solved.objective, rat(3, 2));
        assert_eq!(solved.lambda, vec![(AttrSet::full(4), rat_int(1))]);
    }

    #[test]
    fn modular_triangle_is_three_halves() {
        let rule = cycle_rule(3, 2);
        let full = AttrSet::full(3);
        let solved =
            solve_fixed_lambda(FunctionClass::Modular, &rule, &[(full, rat_int(1))]).unwrap();
        assert_eq!(solved.objective, rat(3, 2));
    }

    #[test]
    fn maximin_on_two_targets() {
        // Body R12, R23, R34 with unit logs; targets {123}, {234}: bound 3/2
        // with λ = (1/2, 1/2).
        let edges = vec![
            AttrSet::from_iter([0, 1]),
            AttrSet::from_iter([1, 2]),
            AttrSet::from_iter([2, 3]),
        ];
        let h = Hypergraph::new(4, edges);
        let constraints = h
            .edges
            .iter()
            .map(|(s, id)| DegreeConstraint::cardinality(*s, 2, Some(*id)).unwrap())
            .collect();
        let rule = DisjunctiveRule {
            hypergraph: h,
            targets: vec![AttrSet::from_iter([0, 1, 2]), AttrSet::from_iter([1, 2, 3])],
            constraints,
        };
        let solved = solve_maximin(FunctionClass::Polymatroid, &rule).unwrap();
        assert_eq!(solved.objective, rat(3, 2));
        let lam: BTreeMap<AttrSet, Rational> = solved.lambda.iter().cloned().collect();
        assert_eq!(lam[&AttrSet::from_iter([0, 1, 2])], rat(1, 2));
        assert_eq!(lam[&AttrSet::from_iter([1, 2, 3])], rat(1, 2));
    }

    #[test]
    fn unbounded_without_cover_is_error() {
        // Variable 2 appears in an edge with no size bound at all.
        let edges = vec![AttrSet::from_iter([0, 1]), AttrSet::from_iter([2])];
        let h = Hypergraph::new(3, edges);
        let c = vec![DegreeConstraint::cardinality(AttrSet::from_iter([0, 1]), 4, None).unwrap()];
        let rule = DisjunctiveRule::full_query(h, c);
        let err = solve_maximin(FunctionClass::Polymatroid, &rule);
        assert!(matches!(err, Err(Error::DegenerateLp(_))));
    }

    #[test]
    fn full_lp_matches_lazy_solver() {
        let rule = cycle_rule(4, 4);
        let full = AttrSet::full(4);
        let lambda = vec![(full, rat_int(1))];
        let built = build_bound_lp(FunctionClass::Polymatroid, &rule, &lambda).unwrap();
        let direct = simplex_solve(&built.lp);
        let lazy = solve_fixed_lambda(FunctionClass::Polymatroid, &rule, &lambda).unwrap();
        assert_eq!(direct.status, LpStatus::Optimal);
        assert_eq!(direct.objective, lazy.objective);
        assert_eq!(lazy.objective, rat_int(4)); // 2·logN at logN=2
    }
}
