//! Exact rational kernel: linear algebra, simplex, and small polytopes.
//!
//! Everything here is generic over [`ExactField`]; the rest of the crate
//! instantiates it at [`crate::Rat`].

mod lp;
mod matrix;
mod polytope;
mod scalar;
pub mod serde_rat;

pub use lp::{lp_feasible_point, lp_maximize, lp_optimum, Constraint, LpOutcome, Relation};
pub use matrix::{is_negative_definite, solve_linear, LinearSolution, Matrix};
pub use polytope::{ccw_order, convex_hull, Halfspace, Polytope, MAX_DIM};
pub use scalar::{dot, dot_int, to_field, ExactField};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("ambient dimension {0} is not supported (at most 3)")]
    UnsupportedDimension(usize),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("integer overflow")]
    Overflow,
}
