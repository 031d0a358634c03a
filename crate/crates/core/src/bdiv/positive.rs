//! Fixed parts, mobile parts and the positive part of a toric divisor.
//!
//! With `L_k` the lattice points of the section polytope of `kD`, the
//! mobile part `M_k` is the nef b-divisor of `conv(L_k)` scaled by `1/k`
//! and `Fix(kD) = k·D̄ - k·M_k`. For big `D` the `M_k` converge to the
//! b-divisor of the full section polytope, which is the positive part.

use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{is_nef_bdiv, linearization_rays, probe_set, BDiv, BDivError};
use crate::exact::ExactField;
use crate::fan::{is_big, section_polytope, Fan, LatticeVec, TorusDivisor};
use crate::{QPolytope, Rat};

fn int_rat(k: i64) -> Rat {
    Rat::from_integer(k.into())
}

/// Lattice points of the section polytope of `kD`, as rational points.
fn section_points(fan: &Fan, d: &TorusDivisor, k: i64) -> Result<Vec<Vec<Rat>>, BDivError> {
    let pts = section_polytope(fan, d, k)?.lattice_points()?;
    if pts.is_empty() {
        return Err(BDivError::NoSections(k));
    }
    Ok(pts.into_iter().map(|p| p.into_iter().map(int_rat).collect()).collect())
}

/// `Fix(kD̄)`, whose value at `v` is `k·trace(v) + min_{m ∈ L_k} ⟨m, v⟩`.
pub fn fix_part(fan: &Arc<Fan>, d: &TorusDivisor, k: i64) -> Result<BDiv, BDivError> {
    assert!(k > 0, "fix_part needs k > 0");
    let pts = section_points(fan, d, k)?;
    let hull = BDiv::polytope_nef(QPolytope::from_points(fan.dim(), &pts)?, Rat::one())?;
    BDiv::sum(vec![
        BDiv::scale(int_rat(k), BDiv::closure(fan.clone(), d.clone())?),
        BDiv::scale(-Rat::one(), hull),
    ])
}

/// `M_k(D) = D̄ - Fix(kD̄)/k`.
pub fn mobile_part(fan: &Arc<Fan>, d: &TorusDivisor, k: i64) -> Result<BDiv, BDivError> {
    assert!(k > 0, "mobile_part needs k > 0");
    let pts = section_points(fan, d, k)?;
    let m = BDiv::polytope_nef(QPolytope::from_points(fan.dim(), &pts)?, Rat::new(1.into(), k.into()))?;
    debug_assert!({
        let via_fix = BDiv::closure(fan.clone(), d.clone())?
            .minus(BDiv::scale(Rat::new(1.into(), k.into()), fix_part(fan, d, k)?))?;
        fan.rays().iter().all(|r| m.value_at(r).ok() == via_fix.value_at(r).ok())
    });
    Ok(m)
}

/// The positive part of an effective big divisor: the b-divisor of its
/// section polytope.
pub fn positive_part_exact(fan: &Arc<Fan>, d: &TorusDivisor) -> Result<BDiv, BDivError> {
    if !d.is_effective() {
        return Err(BDivError::NotEffective);
    }
    if !is_big(fan, d)? {
        return Err(BDivError::NotBig);
    }
    BDiv::polytope_nef(section_polytope(fan, d, 1)?, Rat::one())
}

/// `M_k(D)`, a nef lower bound for the positive part; the only form
/// offered for divisors that are not big.
pub fn positive_part_approx(fan: &Arc<Fan>, d: &TorusDivisor, k: i64) -> Result<BDiv, BDivError> {
    mobile_part(fan, d, k)
}

/// Integer `m` with `⟨m, v⟩ + k·B(v) ≥ 0` for every primitive `v`, sorted.
///
/// The condition is checked on the arrangement rays of `B`; those include
/// `±e_i`, which bound each coordinate.
pub fn global_sections(b: &BDiv, k: i64) -> Result<Vec<Vec<i64>>, BDivError> {
    assert!(k > 0, "global_sections needs k > 0");
    let n = b.dim();
    let kq = int_rat(k);
    let rays = linearization_rays(&[b])?;
    // ⟨m, r⟩ is an integer, so each bound may be rounded up.
    let bounds: Vec<i64> = rays
        .iter()
        .map(|r| {
            let lb = -(b.value_at(r)? * &kq);
            lb.ceil_int().ok_or(BDivError::Exact(crate::exact::ExactError::Overflow))
        })
        .collect::<Result<_, _>>()?;
    let bound_at = |v: &[i64]| bounds[rays.iter().position(|r| r.coords() == v).expect("±e_i present")];
    let mut ranges = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        let lo = bound_at(&e);
        e[i] = -1;
        let hi = -bound_at(&e);
        if lo > hi {
            return Ok(Vec::new());
        }
        ranges.push(lo..=hi);
    }
    Ok(ranges
        .into_iter()
        .multi_cartesian_product()
        .filter(|m| {
            rays.iter().zip(&bounds).all(|(r, &lb)| {
                let s: i64 = r.coords().iter().zip(m).map(|(a, b)| a * b).sum();
                s >= lb
            })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionCheck {
    pub k: i64,
    pub positive_part: usize,
    pub divisor: usize,
    pub equal: bool,
}

/// Outcome of checking a candidate positive part against its divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub sections: Vec<SectionCheck>,
    /// First probe where `D̄ - P` is negative.
    pub negative_part_violation: Option<LatticeVec>,
    pub positive_part_nef: bool,
    pub candidates_checked: usize,
    /// `(candidate index, probe)` where a nef candidate exceeds `P`.
    pub maximality_violations: Vec<(usize, LatticeVec)>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.equal)
            && self.negative_part_violation.is_none()
            && self.positive_part_nef
            && self.maximality_violations.is_empty()
    }
}

/// Options for [`verify_decomposition`].
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub kmax: i64,
    pub probe_box: i64,
    /// Random nef candidates below `D̄` to test maximality against.
    pub random_candidates: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { kmax: 5, probe_box: 5, random_candidates: 20, seed: 0 }
    }
}

/// Checks that `p` carries all sections of `D` up to `kmax`, that `D̄ - p`
/// is effective, that `p` is nef, and that no nef b-divisor below `D̄`
/// among the mobile parts, seeded random sub-hulls of their section sets,
/// and `extra` exceeds `p`.
pub fn verify_decomposition(
    fan: &Arc<Fan>,
    d: &TorusDivisor,
    p: &BDiv,
    extra: &[BDiv],
    opts: &VerifyOptions,
) -> Result<DecompositionReport, BDivError> {
    let dbar = BDiv::closure(fan.clone(), d.clone())?;
    let n = fan.dim();

    let mut sections = Vec::new();
    for k in 1..=opts.kmax {
        let sp = global_sections(p, k)?;
        let sd = global_sections(&dbar, k)?;
        sections.push(SectionCheck { k, positive_part: sp.len(), divisor: sd.len(), equal: sp == sd });
    }

    let neg = dbar.clone().minus(p.clone())?;
    let mut probes = probe_set(&[&dbar, p], opts.probe_box)?;
    probes.extend(linearization_rays(&[&neg])?);
    probes.sort();
    probes.dedup();
    let mut negative_part_violation = None;
    for v in &probes {
        if neg.value_at(v)?.is_negative() {
            negative_part_violation = Some(v.clone());
            break;
        }
    }

    let positive_part_nef = is_nef_bdiv(p)?;

    let mut candidates: Vec<BDiv> = extra.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut section_sets = Vec::new();
    for k in 1..=opts.kmax {
        match section_points(fan, d, k) {
            Ok(pts) => {
                candidates.push(BDiv::polytope_nef(QPolytope::from_points(n, &pts)?, Rat::new(1.into(), k.into()))?);
                section_sets.push((k, pts));
            }
            Err(BDivError::NoSections(_)) => {}
            Err(e) => return Err(e),
        }
    }
    for _ in 0..opts.random_candidates {
        let Some((k, pts)) = section_sets.choose(&mut rng) else { break };
        let size = rng.gen_range(1..=pts.len());
        let subset: Vec<Vec<Rat>> = pts.choose_multiple(&mut rng, size).cloned().collect();
        candidates.push(BDiv::polytope_nef(QPolytope::from_points(n, &subset)?, Rat::new(1.into(), (*k).into()))?);
    }

    let mut maximality_violations = Vec::new();
    for (ci, c) in candidates.iter().enumerate() {
        let mut pts = probes.clone();
        pts.extend(linearization_rays(&[c, p])?);
        pts.sort();
        pts.dedup();
        for v in &pts {
            if c.value_at(v)? > p.value_at(v)? {
                maximality_violations.push((ci, v.clone()));
                break;
            }
        }
    }

    Ok(DecompositionReport {
        sections,
        negative_part_violation,
        positive_part_nef,
        candidates_checked: candidates.len(),
        maximality_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_fans::*;
    use super::*;
    use crate::rat;

    fn d(c: &[i64]) -> TorusDivisor {
        TorusDivisor::from_ints(c)
    }

    fn pts(v: &[[i64; 2]]) -> Vec<Vec<i64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn fix_examples() {
        let p = p2();
        let fix = fix_part(&p, &d(&[1, 0, 0]), 1).unwrap();
        for r in p.rays() {
            assert_eq!(fix.value_at(r).unwrap(), rat(0, 1));
        }
        let f = f2();
        let s = lv(&[0, 1]);
        let fix = fix_part(&f, &d(&[0, 1, 0, 0]), 1).unwrap();
        assert_eq!(fix.value_at(&s).unwrap(), rat(1, 1));
        let zero = fix_part(&f, &d(&[0, 0, 0, 0]), 3).unwrap();
        for r in f.rays() {
            assert_eq!(zero.value_at(r).unwrap(), rat(0, 1));
        }
        let neg = d(&[-1, 0, 0, 0]);
        assert_eq!(fix_part(&f, &neg, 1), Err(BDivError::NoSections(1)));
    }

    #[test]
    fn mobile_examples() {
        let f = f2();
        let sf = d(&[1, 1, 0, 0]);
        let s = lv(&[0, 1]);
        assert_eq!(mobile_part(&f, &sf, 1).unwrap().value_at(&s).unwrap(), rat(0, 1));
        assert_eq!(mobile_part(&f, &sf, 2).unwrap().value_at(&s).unwrap(), rat(1, 2));
        // a nef divisor with lattice section polytope has no fixed part
        let p = p2();
        let h = d(&[1, 0, 0]);
        let m = mobile_part(&p, &h, 1).unwrap();
        let cl = BDiv::closure(p.clone(), h).unwrap();
        for v in probe_set(&[&cl], 3).unwrap() {
            assert_eq!(m.value_at(&v).unwrap(), cl.value_at(&v).unwrap());
        }
    }

    #[test]
    fn positive_part_examples() {
        let f = f2();
        let sf = d(&[1, 1, 0, 0]);
        let pd = positive_part_exact(&f, &sf).unwrap();
        let BDiv::PolytopeNef { polytope, .. } = &pd else { panic!() };
        let mut vs = polytope.vertices().unwrap().into_owned();
        vs.sort();
        assert_eq!(vs, vec![vec![rat(-1, 1), rat(-1, 2)], vec![rat(-1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]]);
        assert_eq!(pd.value_at(&lv(&[0, 1])).unwrap(), rat(1, 2));
        assert_eq!(pd.value_at(&lv(&[1, 0])).unwrap(), rat(1, 1));
        let dbar = BDiv::closure(f.clone(), sf.clone()).unwrap();
        let nd = dbar.minus(pd.clone()).unwrap();
        assert_eq!(nd.value_at(&lv(&[0, 1])).unwrap(), rat(1, 2));
        assert_eq!(nd.value_at(&lv(&[1, 0])).unwrap(), rat(0, 1));

        assert_eq!(positive_part_exact(&f, &d(&[0, 1, 0, 0])), Err(BDivError::NotBig));
        assert_eq!(positive_part_exact(&f, &d(&[1, -1, 0, 0])), Err(BDivError::NotEffective));

        let approx2 = positive_part_approx(&f, &sf, 2).unwrap();
        let approx1 = positive_part_approx(&f, &sf, 1).unwrap();
        for v in probe_set(&[&pd], 4).unwrap() {
            assert_eq!(approx2.value_at(&v).unwrap(), pd.value_at(&v).unwrap());
        }
        assert!(approx1.value_at(&lv(&[0, 1])).unwrap() < pd.value_at(&lv(&[0, 1])).unwrap());
        let rigid = positive_part_approx(&f, &d(&[0, 1, 0, 0]), 4).unwrap();
        for v in probe_set(&[&rigid], 3).unwrap() {
            assert_eq!(rigid.value_at(&v).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn section_examples() {
        let p = p2();
        let h = BDiv::closure(p, d(&[1, 0, 0])).unwrap();
        assert_eq!(global_sections(&h, 1).unwrap(), pts(&[[-1, 0], [-1, 1], [0, 0]]));
        assert_eq!(global_sections(&BDiv::zero(2), 4).unwrap(), vec![vec![0, 0]]);
        let f = f2();
        let pd = positive_part_exact(&f, &d(&[1, 1, 0, 0])).unwrap();
        assert_eq!(global_sections(&pd, 1).unwrap(), pts(&[[-1, 0], [0, 0]]));
        let dbar = BDiv::closure(f, d(&[1, 1, 0, 0])).unwrap();
        assert_eq!(global_sections(&dbar, 1).unwrap(), pts(&[[-1, 0], [0, 0]]));
    }

    #[test]
    fn verification_examples() {
        let f = f2();
        let sf = d(&[1, 1, 0, 0]);
        let pd = positive_part_exact(&f, &sf).unwrap();
        let rep = verify_decomposition(&f, &sf, &pd, &[], &VerifyOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");

        let cl = BDiv::closure(f.clone(), sf.clone()).unwrap();
        let rep = verify_decomposition(&f, &sf, &cl, &[], &VerifyOptions::default()).unwrap();
        assert!(rep.negative_part_violation.is_none());
        assert!(rep.maximality_violations.is_empty());
        assert!(!rep.positive_part_nef);

        let rep = verify_decomposition(&f, &sf, &BDiv::zero(2), &[], &VerifyOptions::default()).unwrap();
        assert!(!rep.sections[0].equal);
    }
}
