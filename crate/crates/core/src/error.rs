//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's arguments was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A linear program was too large to build exactly.
    #[error("problem too large: {0}")]
    TooLarge(String),

    /// A bound LP turned out infeasible or unbounded where the theory says
    /// it cannot be; indicates missing constraints or a malformed rule.
    #[error("linear program degenerate: {0}")]
    DegenerateLp(String),

    /// Input data does not satisfy the declared degree constraints.
    #[error("data violates declared constraints: {0}")]
    DataViolation(String),

    /// An enumeration guard tripped (tree decompositions, selector images).
    #[error("enumeration blow-up: {0}")]
    EnumerationBlowUp(String),

    /// An internal invariant failed; always a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
