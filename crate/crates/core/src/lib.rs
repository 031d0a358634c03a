//! Exact Zariski decompositions.
//!
//! * [`surface`]: the classical decomposition `D = P + N` on a surface given
//!   by curves and their intersection matrix, with an independent LP check
//!   of maximality.
//! * [`fan`]: complete simplicial fans, torus-invariant divisors, Cartier
//!   data, star subdivisions and section polytopes.
//! * [`bdiv`]: b-divisors over toric models, the separating blow-up loop,
//!   maxima of nef b-divisors, fixed and mobile parts, and the positive part.
//!
//! All arithmetic is exact. The numerical kernel in [`exact`] is generic
//! over [`exact::ExactField`]; the geometric layers use [`Rat`].

pub mod bdiv;
pub mod exact;
pub mod fan;
pub mod surface;

use num_bigint::BigInt;
use num_rational::Ratio;

/// Arbitrary-precision rational, the scalar of every geometric object.
pub type Rat = Ratio<BigInt>;
/// Rational matrix.
pub type QMat = exact::Matrix<Rat>;
/// Rational polytope.
pub type QPolytope = exact::Polytope<Rat>;
/// Machine-word rationals for small experiments with the generic kernel.
pub type SmallRat = Ratio<i64>;

/// Shorthand for `p/q` as a [`Rat`].
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

pub use bdiv::BDiv;
pub use fan::{Fan, LatticeVec, TorusDivisor};
pub use surface::{Decomposition, SurfaceDivisor, SurfaceModel};
