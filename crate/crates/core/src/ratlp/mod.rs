//! Exact rational linear programming for polymatroid-style bounds.

mod bound;
mod scalar;
mod simplex;

pub use bound::{
    build_bound_lp, build_maximin_lp, solve_fixed_lambda, solve_maximin, BoundLp, RowTag,
    SolvedBound, MAX_LP_VARS,
};
pub use simplex::{simplex_solve, LinearProgram, LpSolution, LpStatus, Row, Sense};
