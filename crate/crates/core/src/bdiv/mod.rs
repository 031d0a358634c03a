//! b-divisors over toric models.
//!
//! A toric valuation is a primitive lattice vector, so a b-divisor is a
//! rational-valued function on primitive vectors. [`BDiv`] is an expression
//! tree whose leaves are Cartier closures of torus-invariant divisors and
//! nef b-divisors given by polytopes; [`BDiv::value_at`] evaluates it.
//!
//! Every such function is piecewise linear and positively homogeneous. The
//! linearization helpers compute a finite ray set on which checking a
//! linear inequality is equivalent to checking it everywhere.

mod linearize;
mod maxnef;
mod positive;
mod separation;

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::ExactError;
use crate::fan::{trace_value, Fan, FanError, LatticeVec, TorusDivisor};
use crate::{QPolytope, Rat};

pub use linearize::{is_nef_bdiv, linearization_fan, linearization_rays, probe_set};
pub use maxnef::{agree_on, max_nef, max_nef_verified, MaxNefStrategy};
pub use positive::{
    fix_part, global_sections, mobile_part, positive_part_approx, positive_part_exact,
    verify_decomposition, DecompositionReport, SectionCheck, VerifyOptions,
};
pub use separation::{
    bad_pairs, classify_types, separate_all, separating_blowup, BlowupOutcome, SeparationReport,
    SeparationStep, TypeLabel,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BDivError {
    #[error("zero vector has no valuation")]
    ZeroVector,
    #[error("ray pair ({0}, {1}) is not a bad pair")]
    NotABadPair(usize, usize),
    #[error("input b-divisor is not nef")]
    NotNef,
    #[error("divisor is not big")]
    NotBig,
    #[error("divisor is not effective")]
    NotEffective,
    #[error("no sections in degree {0}")]
    NoSections(i64),
    #[error("polytope leaf must be nonempty")]
    EmptyPolytope,
    #[error("expression node without arguments")]
    EmptyExpression,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation not supported in ambient dimension {0}")]
    UnsupportedDimension(usize),
    #[error("max-of-nef strategies disagree at {0}")]
    StrategyDisagreement(LatticeVec),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A b-divisor as an evaluable expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BDiv {
    /// Cartier closure of a divisor on a complete fan.
    Closure { fan: Arc<Fan>, divisor: TorusDivisor },
    /// The nef b-divisor `v ↦ -scale · min_{m ∈ Q} ⟨m, v⟩`; `Q` nonempty
    /// with its vertex list filled in.
    PolytopeNef { polytope: Arc<QPolytope>, scale: Rat },
    Sum(Vec<BDiv>),
    Scale(Rat, Box<BDiv>),
    Max(Vec<BDiv>),
    Min(Vec<BDiv>),
}

impl BDiv {
    pub fn closure(fan: impl Into<Arc<Fan>>, divisor: TorusDivisor) -> Result<BDiv, BDivError> {
        let fan = fan.into();
        if divisor.len() != fan.rays().len() {
            return Err(BDivError::DimensionMismatch { expected: fan.rays().len(), found: divisor.len() });
        }
        Ok(BDiv::Closure { fan, divisor })
    }

    pub fn polytope_nef(polytope: QPolytope, scale: Rat) -> Result<BDiv, BDivError> {
        let polytope = polytope.with_vertices()?;
        if polytope.is_empty()? {
            return Err(BDivError::EmptyPolytope);
        }
        Ok(BDiv::PolytopeNef { polytope: Arc::new(polytope), scale })
    }

    /// The zero b-divisor in dimension `dim`.
    pub fn zero(dim: usize) -> BDiv {
        BDiv::PolytopeNef {
            polytope: Arc::new(QPolytope::point(vec![Rat::zero(); dim])),
            scale: Rat::one(),
        }
    }

    pub fn sum(args: Vec<BDiv>) -> Result<BDiv, BDivError> {
        Self::check_args(&args)?;
        Ok(BDiv::Sum(args))
    }

    pub fn max(args: Vec<BDiv>) -> Result<BDiv, BDivError> {
        Self::check_args(&args)?;
        Ok(BDiv::Max(args))
    }

    pub fn min(args: Vec<BDiv>) -> Result<BDiv, BDivError> {
        Self::check_args(&args)?;
        Ok(BDiv::Min(args))
    }

    pub fn scale(factor: Rat, arg: BDiv) -> BDiv {
        BDiv::Scale(factor, Box::new(arg))
    }

    /// `self - other`.
    pub fn minus(self, other: BDiv) -> Result<BDiv, BDivError> {
        Self::sum(vec![self, Self::scale(-Rat::one(), other)])
    }

    fn check_args(args: &[BDiv]) -> Result<(), BDivError> {
        let first = args.first().ok_or(BDivError::EmptyExpression)?.dim();
        match args.iter().find(|a| a.dim() != first) {
            Some(a) => Err(BDivError::DimensionMismatch { expected: first, found: a.dim() }),
            None => Ok(()),
        }
    }

    /// Ambient lattice dimension.
    pub fn dim(&self) -> usize {
        match self {
            BDiv::Closure { fan, .. } => fan.dim(),
            BDiv::PolytopeNef { polytope, .. } => polytope.dim(),
            BDiv::Scale(_, b) => b.dim(),
            BDiv::Sum(a) | BDiv::Max(a) | BDiv::Min(a) => a.first().map_or(0, BDiv::dim),
        }
    }

    /// Coefficient of the valuation `v`.
    pub fn value_at(&self, v: &LatticeVec) -> Result<Rat, BDivError> {
        if v.dim() != self.dim() {
            return Err(BDivError::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        if v.is_zero() {
            return Err(BDivError::ZeroVector);
        }
        self.eval(v)
    }

    fn eval(&self, v: &LatticeVec) -> Result<Rat, BDivError> {
        Ok(match self {
            BDiv::Closure { fan, divisor } => trace_value(fan, divisor, v)?,
            BDiv::PolytopeNef { polytope, scale } => {
                if scale.is_zero() {
                    Rat::zero()
                } else {
                    -(scale * polytope.support_eval(v.coords())?)
                }
            }
            BDiv::Scale(c, b) => {
                if c.is_zero() {
                    Rat::zero()
                } else {
                    c * b.eval(v)?
                }
            }
            BDiv::Sum(args) => {
                let mut acc = Rat::zero();
                for a in args {
                    acc += a.eval(v)?;
                }
                acc
            }
            BDiv::Max(args) => fold_extreme(args, v, |a, b| a.max(b))?,
            BDiv::Min(args) => fold_extreme(args, v, |a, b| a.min(b))?,
        })
    }

    /// All fans appearing in closure leaves.
    pub fn fans(&self) -> Vec<Arc<Fan>> {
        let mut out = Vec::new();
        self.collect_fans(&mut out);
        out
    }

    fn collect_fans(&self, out: &mut Vec<Arc<Fan>>) {
        match self {
            BDiv::Closure { fan, .. } => {
                if !out.iter().any(|f| Arc::ptr_eq(f, fan) || **f == **fan) {
                    out.push(fan.clone());
                }
            }
            BDiv::PolytopeNef { .. } => {}
            BDiv::Scale(_, b) => b.collect_fans(out),
            BDiv::Sum(a) | BDiv::Max(a) | BDiv::Min(a) => a.iter().for_each(|b| b.collect_fans(out)),
        }
    }

    /// Values on every ray of `fan`, as a divisor on it.
    pub fn trace_on(&self, fan: &Fan) -> Result<TorusDivisor, BDivError> {
        fan.rays()
            .iter()
            .map(|r| self.value_at(r))
            .collect::<Result<Vec<_>, _>>()
            .map(TorusDivisor::new)
    }

    /// Whether the expression is nef by construction: nef closures and
    /// polytopes combined by non-negative scaling, sums and maxima.
    pub(crate) fn structurally_nef(&self) -> Result<bool, BDivError> {
        Ok(match self {
            BDiv::Closure { fan, divisor } => crate::fan::is_nef(fan, divisor)?,
            BDiv::PolytopeNef { scale, .. } => !scale.is_negative(),
            BDiv::Scale(c, b) => !c.is_negative() && b.structurally_nef()?,
            BDiv::Sum(a) | BDiv::Max(a) => {
                for b in a {
                    if !b.structurally_nef()? {
                        return Ok(false);
                    }
                }
                true
            }
            BDiv::Min(_) => false,
        })
    }
}

fn fold_extreme(args: &[BDiv], v: &LatticeVec, pick: impl Fn(Rat, Rat) -> Rat) -> Result<Rat, BDivError> {
    let mut it = args.iter();
    let mut acc = it.next().ok_or(BDivError::EmptyExpression)?.eval(v)?;
    for a in it {
        acc = pick(acc, a.eval(v)?);
    }
    Ok(acc)
}

#[cfg(test)]
pub(crate) mod test_fans {
    use super::*;

    pub fn lv(v: &[i64]) -> LatticeVec {
        LatticeVec::new(v.to_vec())
    }

    pub fn p2() -> Arc<Fan> {
        Arc::new(
            Fan::new(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![2, 0]])
                .unwrap(),
        )
    }

    /// Rays (1,0), (0,1), (-1,2), (0,-1): f = D_(1,0), s = D_(0,1) with s² = -2.
    pub fn f2() -> Arc<Fan> {
        Arc::new(
            crate::fan::complete_plane_fan(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 2]), lv(&[0, -1])])
                .unwrap(),
        )
    }

    pub fn p1xp1() -> Arc<Fan> {
        Arc::new(
            crate::fan::complete_plane_fan(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, 0]), lv(&[0, -1])])
                .unwrap(),
        )
    }
}
