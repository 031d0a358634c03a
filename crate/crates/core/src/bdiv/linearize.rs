//! Finite ray sets on which b-divisor expressions are determined.
//!
//! Each expression is linear on the cells of a central hyperplane
//! arrangement: fan walls for closures, normal-fan walls for polytopes, tie
//! loci for maxima and minima, and the coordinate hyperplanes. Those make
//! every cell pointed, so each closed cell is generated by rays of the
//! arrangement and linear inequalities need only be checked there.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Zero;

use super::{BDiv, BDivError};
use crate::exact::dot_int;
use crate::fan::{angle_cmp, complete_plane_fan, Fan, LatticeVec};
use crate::Rat;

impl BDiv {
    /// Every linear form the expression restricts to on some cell.
    fn pieces(&self) -> Result<Vec<Vec<Rat>>, BDivError> {
        let n = self.dim();
        let out: BTreeSet<Vec<Rat>> = match self {
            BDiv::Closure { fan, divisor } => (0..fan.cones().len())
                .map(|c| cone_gradient(fan, c, &divisor.coeffs))
                .collect(),
            BDiv::PolytopeNef { polytope, scale } => polytope
                .vertices()?
                .iter()
                .map(|q| q.iter().map(|x| -(scale * x)).collect())
                .collect(),
            BDiv::Scale(c, b) => b.pieces()?.into_iter().map(|l| l.iter().map(|x| c * x).collect()).collect(),
            BDiv::Sum(args) => {
                let mut acc: BTreeSet<Vec<Rat>> = BTreeSet::from([vec![Rat::zero(); n]]);
                for a in args {
                    let ps = a.pieces()?;
                    acc = acc
                        .iter()
                        .cartesian_product(ps.iter())
                        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
                        .collect();
                }
                acc
            }
            BDiv::Max(args) | BDiv::Min(args) => {
                let mut acc = BTreeSet::new();
                for a in args {
                    acc.extend(a.pieces()?);
                }
                acc
            }
        };
        Ok(out.into_iter().collect())
    }

    /// Normals of hyperplanes containing every locus where the expression
    /// fails to be linear.
    fn hyperplanes(&self, out: &mut BTreeSet<LatticeVec>) -> Result<(), BDivError> {
        match self {
            BDiv::Closure { fan, .. } => {
                let n = fan.dim();
                for c in fan.cones() {
                    for facet in c.iter().combinations(n - 1) {
                        let vs: Vec<&[i64]> = facet.iter().map(|&&i| fan.ray(i).coords()).collect();
                        insert_normal(out, crate::fan::hyperplane_normal(&vs, n))?;
                    }
                }
            }
            BDiv::PolytopeNef { polytope, scale } => {
                if !scale.is_zero() {
                    let vs = polytope.vertices()?;
                    for (a, b) in vs.iter().tuple_combinations() {
                        let d: Vec<Rat> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                        insert_rational_normal(out, &d)?;
                    }
                }
            }
            BDiv::Scale(_, b) => b.hyperplanes(out)?,
            BDiv::Sum(args) => {
                for a in args {
                    a.hyperplanes(out)?;
                }
            }
            BDiv::Max(args) | BDiv::Min(args) => {
                let mut per_child = Vec::with_capacity(args.len());
                for a in args {
                    a.hyperplanes(out)?;
                    per_child.push(a.pieces()?);
                }
                for (pa, pb) in per_child.iter().tuple_combinations() {
                    for (x, y) in pa.iter().cartesian_product(pb) {
                        let d: Vec<Rat> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                        insert_rational_normal(out, &d)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// The linear form the expression equals near `p`; `p` must avoid
    /// every hyperplane of the arrangement.
    fn gradient_at(&self, p: &[i64]) -> Result<Vec<Rat>, BDivError> {
        let n = self.dim();
        Ok(match self {
            BDiv::Closure { fan, divisor } => {
                let c = fan
                    .cone_containing(p)
                    .ok_or_else(|| BDivError::Fan(crate::fan::FanError::NotInSupport(LatticeVec::new(p.to_vec()))))?;
                cone_gradient(fan, c, &divisor.coeffs)
            }
            BDiv::PolytopeNef { polytope, scale } => {
                let vs = polytope.vertices()?;
                let best = vs
                    .iter()
                    .min_by(|a, b| dot_int(p, a).cmp(&dot_int(p, b)))
                    .expect("nonempty polytope");
                best.iter().map(|x| -(scale * x)).collect()
            }
            BDiv::Scale(c, b) => b.gradient_at(p)?.iter().map(|x| c * x).collect(),
            BDiv::Sum(args) => {
                let mut acc = vec![Rat::zero(); n];
                for a in args {
                    for (s, g) in acc.iter_mut().zip(a.gradient_at(p)?) {
                        *s += g;
                    }
                }
                acc
            }
            BDiv::Max(args) | BDiv::Min(args) => {
                let is_max = matches!(self, BDiv::Max(_));
                let mut best: Option<(Rat, Vec<Rat>)> = None;
                for a in args {
                    let g = a.gradient_at(p)?;
                    let val = dot_int(p, &g);
                    let better = match &best {
                        None => true,
                        Some((b, _)) => (is_max && val > *b) || (!is_max && val < *b),
                    };
                    if better {
                        best = Some((val, g));
                    }
                }
                best.ok_or(BDivError::EmptyExpression)?.1
            }
        })
    }
}

/// Linear form of a closure on cone `c`: its value at each unit vector.
fn cone_gradient(fan: &Fan, c: usize, coeffs: &[Rat]) -> Vec<Rat> {
    let n = fan.dim();
    (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            fan.barycentric(c, &e)
                .iter()
                .zip(&fan.cones()[c])
                .fold(Rat::zero(), |acc, (l, &i)| acc + l * &coeffs[i])
        })
        .collect()
}

fn insert_rational_normal(out: &mut BTreeSet<LatticeVec>, d: &[Rat]) -> Result<(), BDivError> {
    if d.iter().all(Zero::is_zero) {
        return Ok(());
    }
    let v = LatticeVec::primitive_from_rational(d)?;
    insert_normal(out, v.0)
}

/// Inserts a normal up to sign, normalized so its first nonzero entry is
/// positive.
fn insert_normal(out: &mut BTreeSet<LatticeVec>, v: Vec<i64>) -> Result<(), BDivError> {
    let lv = LatticeVec::new(v);
    if lv.is_zero() {
        return Ok(());
    }
    let (p, _) = lv.primitive();
    let first = *p.coords().iter().find(|&&x| x != 0).expect("nonzero");
    out.insert(if first < 0 { p.neg() } else { p });
    Ok(())
}

fn common_dim(exprs: &[&BDiv]) -> Result<usize, BDivError> {
    let n = exprs.first().ok_or(BDivError::EmptyExpression)?.dim();
    if let Some(e) = exprs.iter().find(|e| e.dim() != n) {
        return Err(BDivError::DimensionMismatch { expected: n, found: e.dim() });
    }
    Ok(n)
}

fn arrangement(exprs: &[&BDiv]) -> Result<(usize, BTreeSet<LatticeVec>), BDivError> {
    let n = common_dim(exprs)?;
    let mut normals = BTreeSet::new();
    for k in 0..n {
        let mut e = vec![0; n];
        e[k] = 1;
        normals.insert(LatticeVec::new(e));
    }
    for e in exprs {
        e.hyperplanes(&mut normals)?;
    }
    Ok((n, normals))
}

/// Rays of the common linearity arrangement of `exprs`, sorted.
///
/// Every expression is linear on each cone spanned by rays of this set
/// that lie in one closed cell, so a linear inequality holding on all of
/// them holds at every lattice vector.
pub fn linearization_rays(exprs: &[&BDiv]) -> Result<Vec<LatticeVec>, BDivError> {
    let (n, normals) = arrangement(exprs)?;
    let normals: Vec<LatticeVec> = normals.into_iter().collect();
    rays_of_arrangement(n, &normals)
}

fn rays_of_arrangement(n: usize, normals: &[LatticeVec]) -> Result<Vec<LatticeVec>, BDivError> {
    let mut rays = BTreeSet::new();
    match n {
        1 => {
            rays.insert(LatticeVec::new(vec![1]));
            rays.insert(LatticeVec::new(vec![-1]));
        }
        2 => {
            for h in normals {
                let r = LatticeVec::new(crate::fan::hyperplane_normal(&[h.coords()], 2));
                rays.insert(r.primitive().0);
                rays.insert(r.neg().primitive().0);
            }
        }
        3 => {
            for (a, b) in normals.iter().tuple_combinations() {
                let r = LatticeVec::new(crate::fan::hyperplane_normal(&[a.coords(), b.coords()], 3));
                if !r.is_zero() {
                    rays.insert(r.primitive().0);
                    rays.insert(r.neg().primitive().0);
                }
            }
        }
        _ => return Err(BDivError::UnsupportedDimension(n)),
    }
    Ok(rays.into_iter().collect())
}

/// A complete fan on which every expression is linear on each cone.
///
/// Closures over a single shared fan with no other leaves and no tie loci
/// reuse that fan; otherwise, in dimensions 1 and 2, the fan whose cones
/// join consecutive arrangement rays. Other dimensions are unsupported:
/// use [`linearization_rays`] there.
pub fn linearization_fan(exprs: &[&BDiv]) -> Result<Fan, BDivError> {
    let n = common_dim(exprs)?;
    if let Some(fan) = shared_closure_fan(exprs) {
        return Ok(fan);
    }
    let rays = linearization_rays(exprs)?;
    match n {
        1 => Ok(Fan::new(rays, vec![vec![0], vec![1]])?),
        2 => Ok(complete_plane_fan(rays)?),
        _ => Err(BDivError::UnsupportedDimension(n)),
    }
}

/// The fan of a sum of scaled closures over one fan.
fn shared_closure_fan(exprs: &[&BDiv]) -> Option<Fan> {
    fn walk<'a>(b: &'a BDiv, fans: &mut Vec<&'a Fan>) -> bool {
        match b {
            BDiv::Closure { fan, .. } => {
                fans.push(fan);
                true
            }
            BDiv::Scale(_, inner) => walk(inner, fans),
            BDiv::Sum(args) => args.iter().all(|a| walk(a, fans)),
            _ => false,
        }
    }
    let mut fans = Vec::new();
    if !exprs.iter().all(|e| walk(e, &mut fans)) {
        return None;
    }
    let first = *fans.first()?;
    fans.iter().all(|f| **f == *first).then(|| first.clone())
}

/// Fan rays of every closure leaf plus all primitive vectors with
/// coordinates in `[-bound, bound]`, sorted and deduplicated.
pub fn probe_set(exprs: &[&BDiv], bound: i64) -> Result<Vec<LatticeVec>, BDivError> {
    let n = common_dim(exprs)?;
    let mut out = BTreeSet::new();
    for e in exprs {
        for f in e.fans() {
            out.extend(f.rays().iter().cloned());
        }
    }
    for v in (0..n).map(|_| -bound..=bound).multi_cartesian_product() {
        let lv = LatticeVec::new(v);
        if !lv.is_zero() && lv.is_primitive() {
            out.insert(lv);
        }
    }
    Ok(out.into_iter().collect())
}

/// Whether the expression is nef, i.e. its value function is convex.
///
/// Expressions built from nef leaves by non-negative scaling, sums and
/// maxima are accepted directly. Otherwise every linear form active on a
/// cell of the arrangement must lie below the function at every
/// arrangement ray; a cell is found through the sum of `n` independent
/// arrangement rays whenever that sum avoids every hyperplane.
pub fn is_nef_bdiv(b: &BDiv) -> Result<bool, BDivError> {
    if b.structurally_nef()? {
        return Ok(true);
    }
    let (n, normals) = arrangement(&[b])?;
    let normals: Vec<LatticeVec> = normals.into_iter().collect();
    let rays = rays_of_arrangement(n, &normals)?;
    let values = rays.iter().map(|r| b.value_at(r)).collect::<Result<Vec<_>, _>>()?;
    let generic = |p: &[i64]| normals.iter().all(|h| int_dot(h.coords(), p) != 0);

    let mut interior_points = Vec::new();
    if n == 2 {
        let mut ccw = rays.clone();
        ccw.sort_by(|a, b| angle_cmp(a.coords(), b.coords()));
        for (a, c) in ccw.iter().circular_tuple_windows() {
            interior_points.push(a.add(c).0);
        }
    } else {
        for combo in rays.iter().combinations(n) {
            let p: Vec<i64> = (0..n).map(|k| combo.iter().map(|r| r.coords()[k]).sum()).collect();
            if generic(&p) && !interior_points.contains(&p) {
                interior_points.push(p);
            }
        }
    }
    let mut seen = BTreeSet::new();
    for p in interior_points.iter().filter(|p| generic(p)) {
        let g = b.gradient_at(p)?;
        if !seen.insert(g.clone()) {
            continue;
        }
        for (r, val) in rays.iter().zip(&values) {
            if dot_int(r.coords(), &g) > *val {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn int_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::test_fans::*;
    use super::*;
    use crate::fan::TorusDivisor;
    use crate::rat;

    fn closure(fan: &Arc<Fan>, c: &[i64]) -> BDiv {
        BDiv::closure(fan.clone(), TorusDivisor::from_ints(c)).unwrap()
    }

    #[test]
    fn closure_rays_contain_fan_rays() {
        let fan = f2();
        let b = closure(&fan, &[1, 1, 0, 0]);
        let rays = linearization_rays(&[&b]).unwrap();
        for r in fan.rays() {
            assert!(rays.contains(r), "{r}");
        }
        assert_eq!(linearization_fan(&[&b]).unwrap(), *fan);
    }

    #[test]
    fn nef_detection() {
        let fan = f2();
        // s alone is not nef on F2; s + 2f is.
        let s = closure(&fan, &[0, 1, 0, 0]);
        assert!(!is_nef_bdiv(&s).unwrap());
        let ok = closure(&fan, &[2, 1, 0, 0]);
        assert!(is_nef_bdiv(&ok).unwrap());
        // a minimum of two nef closures is typically not nef
        let p = p2();
        let m = BDiv::min(vec![closure(&p, &[1, 0, 0]), closure(&p, &[0, 1, 0])]).unwrap();
        assert!(!is_nef_bdiv(&m).unwrap());
        let m = BDiv::max(vec![closure(&p, &[1, 0, 0]), closure(&p, &[0, 1, 0])]).unwrap();
        assert!(is_nef_bdiv(&m).unwrap());
        // difference of equal terms is zero, hence nef
        let z = closure(&p, &[1, 0, 0]).minus(closure(&p, &[0, 0, 1])).unwrap();
        assert!(is_nef_bdiv(&z).unwrap());
    }

    #[test]
    fn linearization_fan_makes_max_linear() {
        let p = p2();
        let m = BDiv::max(vec![closure(&p, &[1, 0, 0]), closure(&p, &[0, 1, 0])]).unwrap();
        let lf = linearization_fan(&[&m]).unwrap();
        assert!(lf.rays().contains(&lv(&[1, 1])));
        let d = m.trace_on(&lf).unwrap();
        let cl = BDiv::closure(lf, d).unwrap();
        for v in probe_set(&[&m], 4).unwrap() {
            assert_eq!(cl.value_at(&v).unwrap(), m.value_at(&v).unwrap(), "at {v}");
        }
    }

    #[test]
    fn three_dimensional_cells() {
        let fan = Arc::new(
            Fan::new(
                vec![lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1]), lv(&[-1, -1, -1])],
                vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            )
            .unwrap(),
        );
        let h = closure(&fan, &[1, 0, 0, 0]);
        assert!(is_nef_bdiv(&h).unwrap());
        let neg = BDiv::scale(rat(-1, 1), h.clone());
        assert!(!is_nef_bdiv(&neg).unwrap());
        let mx = BDiv::min(vec![h.clone(), closure(&fan, &[0, 1, 0, 0])]).unwrap();
        assert!(!is_nef_bdiv(&mx).unwrap());
        assert!(linearization_fan(&[&mx]).is_err());
    }
}
