//! Exact rational simplex: dense tableau, two phases, Bland's anti-cycling
//! rule. No scaling, no presolve, no floating point.

use crate::rational::Rational;
use num_traits::{One, Zero};

/// Constraint sense.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// One constraint row with sparse coefficients.
#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// A linear program over variables `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Row>,
    /// Sparse objective coefficients.
    pub objective: Vec<(usize, Rational)>,
    pub maximize: bool,
}

impl LinearProgram {
    pub fn new(num_vars: usize, maximize: bool) -> LinearProgram {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
            objective: Vec::new(),
            maximize,
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(v, _)| *v < self.num_vars));
        self.rows.push(Row { coeffs, sense, rhs });
    }

    /// Debug dump: one row per line, `coeff*var ... <= rhs`.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let goal = if self.maximize { "max" } else { "min" };
        write!(out, "{goal}").unwrap();
        for (v, c) in &self.objective {
            write!(out, " {c}*x{v}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for (v, c) in &row.coeffs {
                if !first {
                    out.push_str(" + ");
                }
                write!(out, "{c}*x{v}").unwrap();
                first = false;
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            writeln!(out, " {op} {}", row.rhs).unwrap();
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of a linear program.
///
/// At `Optimal` the primal is feasible, the dual is feasible, and the two
/// objectives agree exactly; `solve` verifies this before returning. Dual
/// values are reported for the maximization form (negated for minimization
/// inputs so that `rhs . dual` equals the reported objective).
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
    pub objective: Rational,
    /// At `Unbounded`: a feasible ray direction over the structural
    /// variables along which the objective increases without bound.
    pub ray: Option<Vec<Rational>>,
}

/// Solves the program exactly, returning a basic optimal solution when one
/// exists.
pub fn simplex_solve(lp: &LinearProgram) -> LpSolution {
    use crate::ratlp::scalar::Scalar;

    let n = lp.num_vars;
    let m = lp.rows.len();

    // Normalized rows: rhs >= 0, remembering the sign flip for duals.
    let mut senses = Vec::with_capacity(m);
    let mut flipped = vec![false; m];
    let mut dense_rows: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    let mut rhs: Vec<Scalar> = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let mut coeffs = vec![Scalar::zero(); n];
        for (v, c) in &row.coeffs {
            coeffs[*v] = coeffs[*v].add(&Scalar::from_rational(c));
        }
        let mut b = Scalar::from_rational(&row.rhs);
        let mut sense = row.sense;
        if b.is_negative() {
            for c in coeffs.iter_mut() {
                *c = c.neg();
            }
            b = b.neg();
            sense = match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
            flipped[i] = true;
        }
        senses.push(sense);
        dense_rows.push(coeffs);
        rhs.push(b);
    }

    // Column layout: structural | one slack/surplus per row | artificials.
    let aux_base = n;
    let mut num_cols = n + m;
    let mut artificial_of_row: Vec<Option<usize>> = vec![None; m];
    for (i, sense) in senses.iter().enumerate() {
        if !matches!(sense, Sense::Le) {
            artificial_of_row[i] = Some(num_cols);
            num_cols += 1;
        }
    }

    let mut tab: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Scalar::zero(); num_cols + 1];
        row[..n].clone_from_slice(&dense_rows[i]);
        match senses[i] {
            Sense::Le => {
                row[aux_base + i] = Scalar::one();
                basis.push(aux_base + i);
            }
            Sense::Ge => {
                row[aux_base + i] = Scalar::one().neg();
                let a = artificial_of_row[i].unwrap();
                row[a] = Scalar::one();
                basis.push(a);
            }
            Sense::Eq => {
                let a = artificial_of_row[i].unwrap();
                row[a] = Scalar::one();
                basis.push(a);
            }
        }
        row[num_cols] = rhs[i].clone();
        tab.push(row);
    }

    let first_artificial = n + m;
    let mut objective_coeffs = vec![Scalar::zero(); num_cols];
    for (v, c) in &lp.objective {
        let c = if lp.maximize {
            Scalar::from_rational(c)
        } else {
            Scalar::from_rational(c).neg()
        };
        objective_coeffs[*v] = objective_coeffs[*v].add(&c);
    }

    // Phase 1: maximize minus the artificial sum.
    if num_cols > first_artificial {
        let mut phase1 = vec![Scalar::zero(); num_cols];
        for col in phase1.iter_mut().skip(first_artificial) {
            *col = Scalar::one().neg();
        }
        let mut zrow = build_zrow(&tab, &basis, &phase1, num_cols);
        let outcome = run_simplex(&mut tab, &mut basis, &mut zrow, first_artificial, num_cols);
        debug_assert!(matches!(outcome, PivotOutcome::Optimal));
        let value = objective_value(&tab, &basis, &phase1, num_cols);
        if !value.is_zero() {
            return LpSolution {
                status: LpStatus::Infeasible,
                primal: vec![],
                dual: vec![],
                objective: Rational::zero(),
                ray: None,
            };
        }
        // Pivot basic artificials out where possible; rows that cannot be
        // pivoted are redundant and harmless.
        for r in 0..m {
            if basis[r] >= first_artificial {
                if let Some(j) = (0..first_artificial).find(|&j| !tab[r][j].is_zero()) {
                    pivot(&mut tab, &mut basis, &mut zrow, r, j, num_cols);
                }
            }
        }
    }

    // Phase 2: real objective, artificial columns barred from entering.
    let mut zrow = build_zrow(&tab, &basis, &objective_coeffs, num_cols);
    let outcome = run_simplex(&mut tab, &mut basis, &mut zrow, first_artificial, num_cols);
    if let PivotOutcome::Unbounded { entering } = outcome {
        let mut ray = vec![Rational::zero(); num_cols];
        ray[entering] = Rational::one();
        for r in 0..m {
            if !tab[r][entering].is_zero() {
                ray[basis[r]] = tab[r][entering].neg().to_rational();
            }
        }
        ray.truncate(n);
        return LpSolution {
            status: LpStatus::Unbounded,
            primal: vec![],
            dual: vec![],
            objective: Rational::zero(),
            ray: Some(ray),
        };
    }

    // Extract primal, dual and objective.
    let mut primal = vec![Rational::zero(); n];
    for r in 0..m {
        if basis[r] < n {
            primal[basis[r]] = tab[r][num_cols].to_rational();
        }
    }
    let mut dual = Vec::with_capacity(m);
    for i in 0..m {
        let mut y = match senses[i] {
            Sense::Le => zrow[aux_base + i].to_rational(),
            Sense::Ge => -zrow[aux_base + i].to_rational(),
            Sense::Eq => zrow[artificial_of_row[i].unwrap()].to_rational(),
        };
        if flipped[i] {
            y = -y;
        }
        if !lp.maximize {
            y = -y;
        }
        dual.push(y);
    }
    let mut objective = objective_value(&tab, &basis, &objective_coeffs, num_cols).to_rational();
    if !lp.maximize {
        objective = -objective;
    }

    let solution = LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective,
        ray: None,
    };
    verify_optimal(lp, &solution);
    solution
}

enum PivotOutcome {
    Optimal,
    Unbounded { entering: usize },
}

use crate::ratlp::scalar::Scalar;

/// Recomputes the maintained reduced-cost row `d_j = z_j - c_j` for the
/// current basis; done once per phase, then updated by pivots.
fn build_zrow(
    tab: &[Vec<Scalar>],
    basis: &[usize],
    objective: &[Scalar],
    num_cols: usize,
) -> Vec<Scalar> {
    let mut d: Vec<Scalar> = objective.iter().map(|c| c.neg()).collect();
    d.push(Scalar::zero()); // objective value cell
    for (r, row) in tab.iter().enumerate() {
        let cb = &objective[basis[r]];
        if cb.is_zero() {
            continue;
        }
        for j in 0..=num_cols {
            if !row[j].is_zero() {
                d[j] = d[j].add(&cb.mul(&row[j]));
            }
        }
    }
    d
}

/// Bland's rule pivot loop for a maximization objective. Columns at or
/// past `barred_from` never enter the basis.
fn run_simplex(
    tab: &mut [Vec<Scalar>],
    basis: &mut [usize],
    zrow: &mut Vec<Scalar>,
    barred_from: usize,
    num_cols: usize,
) -> PivotOutcome {
    loop {
        let entering = (0..barred_from).find(|&j| zrow[j].is_negative());
        let Some(j) = entering else {
            return PivotOutcome::Optimal;
        };
        // Ratio test; ties broken by smallest basic variable index (Bland).
        let mut best: Option<(Scalar, usize, usize)> = None; // (ratio, basis var, row)
        for (r, row) in tab.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = row[num_cols].div(&row[j]);
                let replace = match &best {
                    None => true,
                    Some((cur, var, _)) => match ratio.cmp(cur) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => basis[r] < *var,
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if replace {
                    best = Some((ratio, basis[r], r));
                }
            }
        }
        match best {
            None => return PivotOutcome::Unbounded { entering: j },
            Some((_, _, r)) => pivot(tab, basis, zrow, r, j, num_cols),
        }
    }
}

fn objective_value(
    tab: &[Vec<Scalar>],
    basis: &[usize],
    objective: &[Scalar],
    num_cols: usize,
) -> Scalar {
    let mut v = Scalar::zero();
    for (r, row) in tab.iter().enumerate() {
        let cb = &objective[basis[r]];
        if !cb.is_zero() {
            v = v.add(&cb.mul(&row[num_cols]));
        }
    }
    v
}

fn pivot(
    tab: &mut [Vec<Scalar>],
    basis: &mut [usize],
    zrow: &mut [Scalar],
    r: usize,
    j: usize,
    num_cols: usize,
) {
    let piv = tab[r][j].clone();
    debug_assert!(!piv.is_zero());
    for c in tab[r].iter_mut() {
        if !c.is_zero() {
            *c = c.div(&piv);
        }
    }
    for rr in 0..tab.len() {
        if rr == r || tab[rr][j].is_zero() {
            continue;
        }
        let factor = tab[rr][j].clone();
        for c in 0..=num_cols {
            if !tab[r][c].is_zero() {
                let delta = factor.mul(&tab[r][c]);
                tab[rr][c] = tab[rr][c].sub(&delta);
            }
        }
        debug_assert!(tab[rr][j].is_zero());
    }
    if !zrow[j].is_zero() {
        let factor = zrow[j].clone();
        for c in 0..=num_cols {
            if !tab[r][c].is_zero() {
                let delta = factor.mul(&tab[r][c]);
                zrow[c] = zrow[c].sub(&delta);
            }
        }
        debug_assert!(zrow[j].is_zero());
    }
    basis[r] = j;
}

/// Exactness check at optimality: primal feasibility of every row and
/// primal objective == dual objective (strong duality, zero tolerance).
fn verify_optimal(lp: &LinearProgram, sol: &LpSolution) {
    for row in &lp.rows {
        let lhs: Rational = row
            .coeffs
            .iter()
            .map(|(v, c)| c * &sol.primal[*v])
            .sum();
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs,
            Sense::Ge => lhs >= row.rhs,
            Sense::Eq => lhs == row.rhs,
        };
        assert!(ok, "optimal solution violates a constraint row");
    }
    let primal_obj: Rational = lp
        .objective
        .iter()
        .map(|(v, c)| c * &sol.primal[*v])
        .sum();
    assert_eq!(primal_obj, sol.objective, "objective mismatch");
    let dual_obj: Rational = lp
        .rows
        .iter()
        .zip(&sol.dual)
        .map(|(row, y)| &row.rhs * y)
        .sum();
    assert_eq!(dual_obj, sol.objective, "strong duality violated");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn max_lp(num_vars: usize) -> LinearProgram {
        LinearProgram::new(num_vars, true)
    }

    #[test]
    fn single_variable_box() {
        let mut lp = max_lp(1);
        lp.objective = vec![(0, rat_int(1))];
        lp.add_row(vec![(0, rat_int(1))], Sense::Le, rat_int(1));
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.primal[0], rat_int(1));
        assert_eq!(sol.dual[0], rat_int(1));
        assert_eq!(sol.objective, rat_int(1));
    }

    #[test]
    fn two_variable_geometry() {
        let mut lp = max_lp(2);
        lp.objective = vec![(0, rat_int(1)), (1, rat_int(1))];
        lp.add_row(vec![(0, rat_int(1)), (1, rat_int(1))], Sense::Le, rat(3, 2));
        lp.add_row(vec![(0, rat_int(1))], Sense::Le, rat_int(1));
        lp.add_row(vec![(1, rat_int(1))], Sense::Le, rat_int(1));
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, rat(3, 2));
    }

    #[test]
    fn unbounded_when_unconstrained() {
        let mut lp = max_lp(1);
        lp.objective = vec![(0, rat_int(1))];
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(sol.ray.unwrap()[0], rat_int(1));
    }

    #[test]
    fn infeasible_system() {
        let mut lp = max_lp(1);
        lp.objective = vec![(0, rat_int(1))];
        lp.add_row(vec![(0, rat_int(1))], Sense::Le, rat_int(1));
        lp.add_row(vec![(0, rat_int(1))], Sense::Ge, rat_int(2));
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_minimization() {
        // min x + y s.t. x + y = 2, x <= 3/2.
        let mut lp = LinearProgram::new(2, false);
        lp.objective = vec![(0, rat_int(1)), (1, rat_int(1))];
        lp.add_row(vec![(0, rat_int(1)), (1, rat_int(1))], Sense::Eq, rat_int(2));
        lp.add_row(vec![(0, rat_int(1))], Sense::Le, rat(3, 2));
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, rat_int(2));
    }

    #[test]
    fn negative_rhs_normalization() {
        // max -x s.t. -x <= -1  (i.e. x >= 1): optimum -1 at x = 1.
        let mut lp = max_lp(1);
        lp.objective = vec![(0, rat_int(-1))];
        lp.add_row(vec![(0, rat_int(-1))], Sense::Le, rat_int(-1));
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, rat_int(-1));
        assert_eq!(sol.primal[0], rat_int(1));
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classic degenerate instance; Bland's rule must terminate.
        let mut lp = max_lp(4);
        lp.objective = vec![
            (0, rat(3, 4)),
            (1, rat_int(-150)),
            (2, rat(1, 50)),
            (3, rat_int(-6)),
        ];
        lp.add_row(
            vec![(0, rat(1, 4)), (1, rat_int(-60)), (2, rat(-1, 25)), (3, rat_int(9))],
            Sense::Le,
            rat_int(0),
        );
        lp.add_row(
            vec![(0, rat(1, 2)), (1, rat_int(-90)), (2, rat(-1, 50)), (3, rat_int(3))],
            Sense::Le,
            rat_int(0),
        );
        lp.add_row(vec![(2, rat_int(1))], Sense::Le, rat_int(1));
        let sol = simplex_solve(&lp);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, rat(1, 20));
    }

    #[test]
    fn dump_format() {
        let mut lp = max_lp(2);
        lp.objective = vec![(0, rat_int(1))];
        lp.add_row(vec![(0, rat_int(1)), (1, rat(1, 2))], Sense::Le, rat_int(3));
        let text = lp.dump();
        assert!(text.contains("1*x0 + 1/2*x1 <= 3"));
    }
}
