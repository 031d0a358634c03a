//! Maximum of two nef b-divisors, computed two independent ways.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{linearization_fan, linearization_rays, probe_set, separate_all, BDiv, BDivError};
use crate::fan::{is_nef, section_polytope, Fan, LatticeVec, TorusDivisor};
use crate::{QPolytope, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxNefStrategy {
    /// Convex hull of the two section polytopes.
    Hull,
    /// Separate the two divisors on a common fan and take the coefficientwise
    /// maximum there.
    Separation,
}

/// A nef leaf as `(Q, s)` with value `-s · h_Q`.
fn nef_leaf(b: &BDiv) -> Result<(Arc<QPolytope>, Rat), BDivError> {
    match b {
        BDiv::Closure { fan, divisor } => {
            if !is_nef(fan, divisor)? {
                return Err(BDivError::NotNef);
            }
            Ok((Arc::new(section_polytope(fan, divisor, 1)?.with_vertices()?), Rat::one()))
        }
        BDiv::PolytopeNef { polytope, scale } if !scale.is_negative() => Ok((polytope.clone(), scale.clone())),
        _ => Err(BDivError::NotNef),
    }
}

/// Vertices of `s · Q`.
fn scaled_vertices(q: &QPolytope, s: &Rat) -> Result<Vec<Vec<Rat>>, BDivError> {
    if s.is_zero() {
        return Ok(vec![vec![Rat::zero(); q.dim()]]);
    }
    Ok(q.vertices()?.iter().map(|v| v.iter().map(|x| x * s).collect()).collect())
}

/// `max(B₁, B₂)` for nef leaves, as a polytope leaf.
pub fn max_nef(b1: &BDiv, b2: &BDiv, strategy: MaxNefStrategy) -> Result<BDiv, BDivError> {
    let n = b1.dim();
    if b2.dim() != n {
        return Err(BDivError::DimensionMismatch { expected: n, found: b2.dim() });
    }
    let (q1, s1) = nef_leaf(b1)?;
    let (q2, s2) = nef_leaf(b2)?;
    match strategy {
        MaxNefStrategy::Hull => {
            let mut pts = scaled_vertices(&q1, &s1)?;
            pts.extend(scaled_vertices(&q2, &s2)?);
            BDiv::polytope_nef(QPolytope::from_points(n, &pts)?, Rat::one())
        }
        MaxNefStrategy::Separation => {
            let (fan, d1, d2) = common_model(b1, b2)?;
            let report = separate_all(&fan, &d1, &d2)?;
            let m = report.max_divisor();
            assert!(is_nef(&report.final_fan, &m)?, "maximum of separated nef divisors is nef");
            BDiv::polytope_nef(section_polytope(&report.final_fan, &m, 1)?, Rat::one())
        }
    }
}

/// A fan on which both are linear, with their traces.
fn common_model(b1: &BDiv, b2: &BDiv) -> Result<(Fan, TorusDivisor, TorusDivisor), BDivError> {
    if let (BDiv::Closure { fan: f1, divisor: d1 }, BDiv::Closure { fan: f2, divisor: d2 }) = (b1, b2) {
        if f1 == f2 {
            return Ok(((**f1).clone(), d1.clone(), d2.clone()));
        }
    }
    let sum = BDiv::sum(vec![b1.clone(), b2.clone()])?;
    let fan = linearization_fan(&[&sum])?;
    let t1 = b1.trace_on(&fan)?;
    let t2 = b2.trace_on(&fan)?;
    Ok((fan, t1, t2))
}

/// First vector in `probes` where `a` and `b` differ.
pub fn agree_on(a: &BDiv, b: &BDiv, probes: &[LatticeVec]) -> Result<Option<LatticeVec>, BDivError> {
    for v in probes {
        if a.value_at(v)? != b.value_at(v)? {
            return Ok(Some(v.clone()));
        }
    }
    Ok(None)
}

/// Runs both strategies and checks them against each other and against the
/// pointwise maximum on the arrangement rays of all four expressions plus
/// the probe box.
pub fn max_nef_verified(
    b1: &BDiv,
    b2: &BDiv,
    strategy: MaxNefStrategy,
    probe_box: i64,
) -> Result<BDiv, BDivError> {
    let hull = max_nef(b1, b2, MaxNefStrategy::Hull)?;
    let sep = max_nef(b1, b2, MaxNefStrategy::Separation)?;
    let pointwise = BDiv::max(vec![b1.clone(), b2.clone()])?;
    let mut probes = probe_set(&[b1, b2], probe_box)?;
    probes.extend(linearization_rays(&[&hull, &sep, &pointwise])?);
    probes.sort();
    probes.dedup();
    for other in [&sep, &pointwise] {
        if let Some(v) = agree_on(&hull, other, &probes)? {
            return Err(BDivError::StrategyDisagreement(v));
        }
    }
    Ok(match strategy {
        MaxNefStrategy::Hull => hull,
        MaxNefStrategy::Separation => sep,
    })
}
