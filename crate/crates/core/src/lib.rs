//! Information-theoretic output-size bounds and proof-directed evaluation
//! for conjunctive queries and disjunctive datalog rules under degree
//! constraints.
//!
//! The crate is organized around one pipeline:
//!
//! 1. [`rule`] describes a disjunctive rule (body hypergraph, targets,
//!    degree constraints).
//! 2. [`ratlp`] builds and solves the polymatroid-cone linear programs in
//!    exact rational arithmetic; [`bounds`] wraps them into the bound zoo
//!    (vertex bound, integral/fractional edge covers, degree-aware
//!    polymatroid bounds) with re-checkable certificates.
//! 3. [`proofseq`] turns a dual certificate into a machine-checkable proof
//!    sequence for the underlying Shannon flow inequality.
//! 4. [`panda`] interprets a proof sequence as relational operations over
//!    [`relalg`] tables, computing a model of the rule within the proved
//!    bound.
//! 5. [`widths`] and [`engine`] assemble tree-decomposition strategies
//!    (worst-case-optimal, fractional-hypertree-width, submodular-width) on
//!    top of the interpreter.
//!
//! Everything numeric is exact: no floating point anywhere in the bound or
//! proof machinery.

pub mod attrset;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod panda;
pub mod proofseq;
pub mod ratlp;
pub mod rational;
pub mod relalg;
pub mod rule;
pub mod testkit;
pub mod widths;

pub use attrset::AttrSet;
pub use error::Error;
pub use rational::{LogQuantity, Rational};
pub use relalg::{Database, Model, Relation};
pub use rule::{DegreeConstraint, DisjunctiveRule, FunctionClass, Hypergraph, RelId};
