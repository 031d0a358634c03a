//! Separating blow-ups for a pair of divisors on one fan.
//!
//! Rays where `D₁` is larger are type 1, where `D₂` is larger type 2. A bad
//! pair is a type-1 ray and a type-2 ray spanning a cone. Subdividing the
//! face they span at the weighted vector that balances the two excesses
//! creates an exceptional ray of type 0 and separates the pair; no new
//! adjacencies among old rays appear, so the bad-pair count drops.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::BDivError;
use crate::exact::{serde_rat, ExactError};
use crate::fan::{star_subdivide, trace_value, Fan, LatticeVec, TorusDivisor};
use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeLabel {
    /// Equal coefficients.
    Zero,
    /// `D₁` strictly larger.
    One,
    /// `D₂` strictly larger.
    Two,
}

impl TypeLabel {
    pub fn as_u8(self) -> u8 {
        match self {
            TypeLabel::Zero => 0,
            TypeLabel::One => 1,
            TypeLabel::Two => 2,
        }
    }
}

impl Serialize for TypeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

fn check_pair(fan: &Fan, d1: &TorusDivisor, d2: &TorusDivisor) -> Result<(), BDivError> {
    let r = fan.rays().len();
    for d in [d1, d2] {
        if d.len() != r {
            return Err(BDivError::DimensionMismatch { expected: r, found: d.len() });
        }
    }
    Ok(())
}

pub fn classify_types(fan: &Fan, d1: &TorusDivisor, d2: &TorusDivisor) -> Result<Vec<TypeLabel>, BDivError> {
    check_pair(fan, d1, d2)?;
    Ok(d1
        .coeffs
        .iter()
        .zip(&d2.coeffs)
        .map(|(a, b)| match a.cmp(b) {
            std::cmp::Ordering::Greater => TypeLabel::One,
            std::cmp::Ordering::Less => TypeLabel::Two,
            std::cmp::Ordering::Equal => TypeLabel::Zero,
        })
        .collect())
}

/// All `(i, j)` with `i` of type 1, `j` of type 2 and both in one cone,
/// in lexicographic order.
pub fn bad_pairs(fan: &Fan, d1: &TorusDivisor, d2: &TorusDivisor) -> Result<Vec<(usize, usize)>, BDivError> {
    let types = classify_types(fan, d1, d2)?;
    let ones = types.iter().enumerate().filter(|(_, t)| **t == TypeLabel::One).map(|(i, _)| i);
    let mut out = Vec::new();
    for i in ones {
        for (j, t) in types.iter().enumerate() {
            if *t == TypeLabel::Two && fan.spans_cone(i, j) {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// One step of the separation loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationStep {
    pub pair: (usize, usize),
    #[serde(with = "serde_rat")]
    pub c1: Rat,
    #[serde(with = "serde_rat")]
    pub c2: Rat,
    /// `(a, b)` coprime with `a / b = c1 / c2`.
    pub weights: (i64, i64),
    /// Primitive generator of the exceptional ray.
    pub w: LatticeVec,
    /// Content of `b·v_i + a·v_j`.
    pub g: i64,
    pub exceptional: usize,
    pub exceptional_type: TypeLabel,
    pub bad_pairs_before: usize,
    pub bad_pairs_after: usize,
}

/// A blow-up together with the pulled-back divisors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupOutcome {
    pub fan: Fan,
    pub d1: TorusDivisor,
    pub d2: TorusDivisor,
    pub step: SeparationStep,
}

/// Blows up the bad pair `(i, j)`.
///
/// # Panics
/// If the exceptional ray is not of type 0 or rays `i`, `j` still share a
/// cone; both are theorems, so a panic means an arithmetic bug.
pub fn separating_blowup(
    fan: &Fan,
    d1: &TorusDivisor,
    d2: &TorusDivisor,
    (i, j): (usize, usize),
) -> Result<BlowupOutcome, BDivError> {
    let before = bad_pairs(fan, d1, d2)?;
    if !before.contains(&(i, j)) {
        return Err(BDivError::NotABadPair(i, j));
    }
    let c1 = &d1.coeffs[i] - &d2.coeffs[i];
    let c2 = &d2.coeffs[j] - &d1.coeffs[j];
    debug_assert!(c1.is_positive() && c2.is_positive());
    let ratio = &c1 / &c2;
    let a = ratio.numer().to_i64().ok_or(ExactError::Overflow)?;
    let b = ratio.denom().to_i64().ok_or(ExactError::Overflow)?;
    let raw = fan.ray(i).scale(b).add(&fan.ray(j).scale(a));
    let (w, g) = raw.primitive();

    let (fine, e) = star_subdivide(fan, &w)?;
    let mut p1 = d1.coeffs.clone();
    p1.push(trace_value(fan, d1, &w)?);
    let mut p2 = d2.coeffs.clone();
    p2.push(trace_value(fan, d2, &w)?);
    let (p1, p2) = (TorusDivisor::new(p1), TorusDivisor::new(p2));

    let gq = Rat::from_integer(g.into());
    let (aq, bq) = (Rat::from_integer(a.into()), Rat::from_integer(b.into()));
    for (orig, pulled) in [(d1, &p1), (d2, &p2)] {
        let expected = (&bq * &orig.coeffs[i] + &aq * &orig.coeffs[j]) / &gq;
        debug_assert_eq!(pulled.coeffs[e], expected, "exceptional coefficient");
    }
    assert!((&bq * &c1 - &aq * &c2).is_zero());
    let types = classify_types(&fine, &p1, &p2)?;
    assert_eq!(types[e], TypeLabel::Zero, "exceptional ray of a separating blow-up has type 0");
    assert!(!fine.spans_cone(i, j), "rays {i} and {j} still meet");
    debug_assert_eq!(&types[..e], &classify_types(fan, d1, d2)?[..]);

    let after = bad_pairs(&fine, &p1, &p2)?.len();
    let step = SeparationStep {
        pair: (i, j),
        c1,
        c2,
        weights: (a, b),
        w,
        g,
        exceptional: e,
        exceptional_type: types[e],
        bad_pairs_before: before.len(),
        bad_pairs_after: after,
    };
    Ok(BlowupOutcome { fan: fine, d1: p1, d2: p2, step })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub initial_bad_pairs: usize,
    pub steps: Vec<SeparationStep>,
    pub final_fan: Fan,
    pub pullbacks: (TorusDivisor, TorusDivisor),
}

impl SeparationReport {
    /// Componentwise maximum of the final pullbacks.
    pub fn max_divisor(&self) -> TorusDivisor {
        TorusDivisor::max(&self.pullbacks.0, &self.pullbacks.1)
    }

    /// Checks the recorded invariants: every exceptional ray has type 0,
    /// the count drops at every step, ends at zero, and the number of
    /// steps is bounded by the initial count.
    pub fn invariants_hold(&self) -> bool {
        let mut prev = self.initial_bad_pairs;
        for s in &self.steps {
            if s.exceptional_type != TypeLabel::Zero || s.bad_pairs_before != prev || s.bad_pairs_after >= prev {
                return false;
            }
            prev = s.bad_pairs_after;
        }
        prev == 0
            && self.steps.len() <= self.initial_bad_pairs
            && bad_pairs(&self.final_fan, &self.pullbacks.0, &self.pullbacks.1).is_ok_and(|b| b.is_empty())
    }
}

/// Blows up the lexicographically first bad pair until none remain.
pub fn separate_all(fan: &Fan, d1: &TorusDivisor, d2: &TorusDivisor) -> Result<SeparationReport, BDivError> {
    let initial = bad_pairs(fan, d1, d2)?;
    let (mut f, mut a, mut b) = (fan.clone(), d1.clone(), d2.clone());
    let mut steps = Vec::new();
    let mut pairs = initial.clone();
    while let Some(&pair) = pairs.first() {
        let out = separating_blowup(&f, &a, &b, pair)?;
        assert!(out.step.bad_pairs_after < out.step.bad_pairs_before, "bad-pair count must drop");
        steps.push(out.step);
        f = out.fan;
        a = out.d1;
        b = out.d2;
        pairs = bad_pairs(&f, &a, &b)?;
    }
    assert!(steps.len() <= initial.len());
    Ok(SeparationReport { initial_bad_pairs: initial.len(), steps, final_fan: f, pullbacks: (a, b) })
}

#[cfg(test)]
mod tests {
    use super::super::test_fans::*;
    use super::*;
    use crate::fan::{is_nef, validate_fan};
    use crate::rat;

    fn d(c: &[i64]) -> TorusDivisor {
        TorusDivisor::from_ints(c)
    }

    #[test]
    fn type_labels() {
        let f = p2();
        use TypeLabel::*;
        assert_eq!(classify_types(&f, &d(&[1, 0, 0]), &d(&[0, 1, 0])).unwrap(), vec![One, Two, Zero]);
        assert_eq!(classify_types(&f, &d(&[2, 0, 0]), &d(&[1, 1, 0])).unwrap(), vec![One, Two, Zero]);
        assert_eq!(classify_types(&f, &d(&[1, 2, 3]), &d(&[1, 2, 3])).unwrap(), vec![Zero; 3]);
        assert_eq!(serde_json::to_string(&One).unwrap(), "1");
    }

    #[test]
    fn bad_pair_examples() {
        let f = p2();
        assert_eq!(bad_pairs(&f, &d(&[1, 0, 0]), &d(&[0, 1, 0])).unwrap(), vec![(0, 1)]);
        assert!(bad_pairs(&f, &d(&[1, 1, 1]), &d(&[1, 1, 1])).unwrap().is_empty());
        // rays (1,0), (0,1), (-1,0), (0,-1) after ccw sort in p1xp1
        let sq = p1xp1();
        let e1 = sq.ray_index(&lv(&[1, 0])).unwrap();
        let m1 = sq.ray_index(&lv(&[-1, 0])).unwrap();
        let a = TorusDivisor::prime(4, e1, rat(1, 1));
        let b = TorusDivisor::prime(4, m1, rat(1, 1));
        assert!(bad_pairs(&sq, &a, &b).unwrap().is_empty());
    }

    #[test]
    fn blowup_examples() {
        let f = p2();
        let out = separating_blowup(&f, &d(&[1, 0, 0]), &d(&[0, 1, 0]), (0, 1)).unwrap();
        assert_eq!(out.step.weights, (1, 1));
        assert_eq!(out.step.w, lv(&[1, 1]));
        assert_eq!(out.step.g, 1);
        assert_eq!(out.d1, d(&[1, 0, 0, 1]));
        assert_eq!(out.d2, d(&[0, 1, 0, 1]));
        assert!(validate_fan(&out.fan).is_valid());

        let out = separating_blowup(&f, &d(&[2, 0, 0]), &d(&[0, 1, 0]), (0, 1)).unwrap();
        assert_eq!(out.step.weights, (2, 1));
        assert_eq!(out.step.w, lv(&[1, 2]));
        assert_eq!(out.d1.coeffs[3], rat(2, 1));
        assert_eq!(out.d2.coeffs[3], rat(2, 1));

        assert_eq!(
            separating_blowup(&f, &d(&[1, 0, 0]), &d(&[0, 1, 0]), (1, 0)),
            Err(BDivError::NotABadPair(1, 0))
        );
    }

    #[test]
    fn non_primitive_weighted_vector() {
        // rays (1,0) and (1,2) span a cone of determinant 2; equal excesses give
        // w = (2,2), reduced by g = 2
        let fan = crate::fan::complete_plane_fan(vec![lv(&[1, 0]), lv(&[1, 2]), lv(&[-1, 0]), lv(&[0, -1])])
            .unwrap();
        let i = fan.ray_index(&lv(&[1, 0])).unwrap();
        let j = fan.ray_index(&lv(&[1, 2])).unwrap();
        let a = TorusDivisor::prime(4, i, rat(1, 1));
        let b = TorusDivisor::prime(4, j, rat(1, 1));
        let out = separating_blowup(&fan, &a, &b, (i, j)).unwrap();
        assert_eq!(out.step.g, 2);
        assert_eq!(out.step.w, lv(&[1, 1]));
        assert_eq!(out.d1.coeffs[out.step.exceptional], rat(1, 2));
        assert_eq!(out.d2.coeffs[out.step.exceptional], rat(1, 2));
    }

    #[test]
    fn separate_all_examples() {
        let f = p2();
        let rep = separate_all(&f, &d(&[1, 0, 0]), &d(&[0, 1, 0])).unwrap();
        assert_eq!(rep.steps.len(), 1);
        assert_eq!(rep.max_divisor(), d(&[1, 1, 0, 1]));
        assert!(is_nef(&rep.final_fan, &rep.max_divisor()).unwrap());
        assert!(rep.invariants_hold());

        let same = separate_all(&f, &d(&[1, 0, 0]), &d(&[1, 0, 0])).unwrap();
        assert!(same.steps.is_empty());

        let sq = p1xp1();
        let e1 = sq.ray_index(&lv(&[1, 0])).unwrap();
        let e2 = sq.ray_index(&lv(&[0, 1])).unwrap();
        let rep = separate_all(
            &sq,
            &TorusDivisor::prime(4, e1, rat(1, 1)),
            &TorusDivisor::prime(4, e2, rat(1, 1)),
        )
        .unwrap();
        assert_eq!(rep.steps.len(), 1);
        assert_eq!(rep.steps[0].w, lv(&[1, 1]));
    }

    #[test]
    fn report_serializes_rationals_as_strings() {
        let rep = separate_all(&p2(), &d(&[2, 0, 0]), &d(&[0, 3, 0])).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["steps"][0]["c1"], "2");
        assert_eq!(json["steps"][0]["weights"], serde_json::json!([2, 3]));
        assert_eq!(json["final_fan"]["rays"][3], serde_json::json!([3, 2]));
    }
}
