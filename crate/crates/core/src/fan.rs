//! Complete simplicial fans and their torus-invariant divisors.
//!
//! A divisor is a rational coefficient per ray. Its trace at a lattice
//! vector `v` is the coefficient the valuation `v` sees after pulling back
//! to any model where `v` is a ray: writing `v = Σ λ_i v_i` in a cone
//! containing it, the trace is `Σ λ_i a_i`. Star subdivision is the toric
//! blow-up.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{
    dot_int, lp_feasible_point, solve_linear, Constraint, ExactError, Halfspace, LinearSolution,
    Relation, MAX_DIM,
};
use crate::{QMat, QPolytope, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("invalid fan: {}", .0.iter().map(ToString::to_string).join("; "))]
    Invalid(Vec<FanViolation>),
    #[error("vector {0} is not primitive")]
    NonPrimitive(LatticeVec),
    #[error("vector {0} is already a ray")]
    AlreadyARay(LatticeVec),
    #[error("zero vector")]
    ZeroVector,
    #[error("vector {0} lies in no cone")]
    NotInSupport(LatticeVec),
    #[error("fan is not smooth: {0}")]
    NonSmooth(String),
    #[error("expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ambient dimension {0} unsupported here")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// An integer vector; a ray generator when primitive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVec(pub Vec<i64>);

impl LatticeVec {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVec(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// gcd of the coordinates; zero for the zero vector.
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &a| g.gcd(&a))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// The primitive vector on the same ray together with the factor removed.
    pub fn primitive(&self) -> (LatticeVec, i64) {
        let g = self.content();
        if g == 0 {
            return (self.clone(), 0);
        }
        (LatticeVec(self.0.iter().map(|a| a / g).collect()), g)
    }

    pub fn dot(&self, m: &[Rat]) -> Rat {
        dot_int(&self.0, m)
    }

    pub fn add(&self, other: &LatticeVec) -> LatticeVec {
        LatticeVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> LatticeVec {
        LatticeVec(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> LatticeVec {
        self.scale(-1)
    }

    /// Primitive integer vector on the ray through a nonzero rational vector.
    pub fn primitive_from_rational(v: &[Rat]) -> Result<LatticeVec, FanError> {
        if v.iter().all(Zero::is_zero) {
            return Err(FanError::ZeroVector);
        }
        let lcm = v.iter().fold(num_bigint::BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
        let g = ints.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x));
        let coords = ints
            .iter()
            .map(|x| (x / &g).to_i64().ok_or(FanError::Exact(ExactError::Overflow)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LatticeVec(coords))
    }

    pub fn to_rat(&self) -> Vec<Rat> {
        self.0.iter().map(|&a| Rat::from_integer(a.into())).collect()
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

impl fmt::Debug for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Vec<i64>> for LatticeVec {
    fn from(v: Vec<i64>) -> Self {
        LatticeVec(v)
    }
}

/// Counterclockwise angular order of nonzero plane vectors starting at the
/// positive x-axis.
pub fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    let half = |v: &[i64]| (v[1] < 0 || (v[1] == 0 && v[0] < 0)) as u8;
    half(a).cmp(&half(b)).then_with(|| {
        let cross = a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128;
        0.cmp(&cross)
    })
}

/// Integer normal of the hyperplane spanned by `n - 1` vectors in `Z^n`.
pub fn hyperplane_normal(vs: &[&[i64]], n: usize) -> Vec<i64> {
    match n {
        1 => vec![1],
        2 => vec![-vs[0][1], vs[0][0]],
        3 => {
            let (a, b) = (vs[0], vs[1]);
            vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]
        }
        _ => panic!("hyperplane_normal: dimension {n} unsupported"),
    }
}

fn int_dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanViolation {
    NoCones,
    UnsupportedDimension(usize),
    RayDimension { ray: usize },
    ZeroRay { ray: usize },
    NonPrimitive { ray: usize },
    DuplicateRay { ray: usize, first: usize },
    UnusedRay { ray: usize },
    ConeSize { cone: usize },
    ConeIndex { cone: usize },
    RepeatedRay { cone: usize },
    NotSimplicial { cone: usize },
    DuplicateCone { cone: usize, first: usize },
    UnpairedFacet { facet: Vec<usize>, count: usize },
    FacetSameSide { facet: Vec<usize> },
    OverlappingCones { a: usize, b: usize },
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FanViolation::*;
        match self {
            NoCones => write!(f, "no maximal cones"),
            UnsupportedDimension(n) => write!(f, "ambient dimension {n} outside 1..=3"),
            RayDimension { ray } => write!(f, "ray {ray} has the wrong length"),
            ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            NonPrimitive { ray } => write!(f, "ray {ray} is not primitive"),
            DuplicateRay { ray, first } => write!(f, "ray {ray} repeats ray {first}"),
            UnusedRay { ray } => write!(f, "ray {ray} lies in no cone"),
            ConeSize { cone } => write!(f, "cone {cone} does not have n rays"),
            ConeIndex { cone } => write!(f, "cone {cone} references a missing ray"),
            RepeatedRay { cone } => write!(f, "cone {cone} repeats a ray"),
            NotSimplicial { cone } => write!(f, "cone {cone} has dependent generators"),
            DuplicateCone { cone, first } => write!(f, "cone {cone} repeats cone {first}"),
            UnpairedFacet { facet, count } => {
                write!(f, "facet {facet:?} lies in {count} cones, expected 2")
            }
            FacetSameSide { facet } => {
                write!(f, "the two cones on facet {facet:?} lie on the same side")
            }
            OverlappingCones { a, b } => write!(f, "cones {a} and {b} have overlapping interiors"),
        }
    }
}

/// Result of [`validate_fan`]; valid iff no violations were found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FanDiagnostics {
    pub violations: Vec<FanViolation>,
}

impl FanDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A complete simplicial fan: primitive rays and maximal cones given as
/// sorted ray-index lists.
pub struct Fan {
    dim: usize,
    rays: Vec<LatticeVec>,
    cones: Vec<Vec<usize>>,
    /// Per cone, the inverse of the matrix whose rows are its generators.
    inverses: OnceLock<Vec<QMat>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan {
            dim: self.dim,
            rays: self.rays.clone(),
            cones: self.cones.clone(),
            inverses: self.inverses.clone(),
        }
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl Serialize for Fan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Fan", 2)?;
        st.serialize_field("rays", &self.rays)?;
        st.serialize_field("cones", &self.cones)?;
        st.end()
    }
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan").field("rays", &self.rays).field("cones", &self.cones).finish()
    }
}

/// Non-fatal findings while building a fan from raw input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayReduced {
    pub ray: usize,
    pub factor: i64,
}

impl Fan {
    /// Builds and validates a fan; any violation is an error.
    pub fn new(rays: Vec<LatticeVec>, cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        let fan = Fan::from_parts_unchecked(rays, cones);
        let diag = validate_fan(&fan);
        if diag.is_valid() {
            Ok(fan)
        } else {
            Err(FanError::Invalid(diag.violations))
        }
    }

    /// Like [`Fan::new`] but divides non-primitive generators by their
    /// content first, reporting every reduction.
    pub fn new_reducing(
        rays: Vec<LatticeVec>,
        cones: Vec<Vec<usize>>,
    ) -> Result<(Fan, Vec<RayReduced>), FanError> {
        let mut reduced = Vec::new();
        let rays = rays
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let (p, g) = r.primitive();
                if g > 1 {
                    reduced.push(RayReduced { ray: i, factor: g });
                }
                p
            })
            .collect();
        Ok((Fan::new(rays, cones)?, reduced))
    }

    /// No validation; cone index lists are sorted.
    pub fn from_parts_unchecked(rays: Vec<LatticeVec>, mut cones: Vec<Vec<usize>>) -> Fan {
        let dim = rays.first().map_or(0, LatticeVec::dim);
        for c in cones.iter_mut() {
            c.sort_unstable();
        }
        Fan { dim, rays, cones, inverses: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVec] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVec {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn ray_index(&self, v: &LatticeVec) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// Whether rays `i` and `j` lie in a common maximal cone.
    pub fn spans_cone(&self, i: usize, j: usize) -> bool {
        self.cones.iter().any(|c| c.contains(&i) && c.contains(&j))
    }

    fn inverses(&self) -> &[QMat] {
        self.inverses.get_or_init(|| {
            self.cones
                .iter()
                .map(|c| {
                    let m = QMat::from_int_rows(
                        &c.iter().map(|&i| self.rays[i].0.clone()).collect::<Vec<_>>(),
                    )
                    .expect("cone rows have equal length");
                    invert(&m).expect("simplicial cone")
                })
                .collect()
        })
    }

    /// Coordinates of `v` in the generators of `cone`, i.e. `λ` with
    /// `v = Σ λ_i v_{cone[i]}`.
    pub fn barycentric(&self, cone: usize, v: &[i64]) -> Vec<Rat> {
        let inv = &self.inverses()[cone];
        (0..self.dim)
            .map(|j| {
                (0..self.dim).fold(Rat::zero(), |acc, k| {
                    if v[k] == 0 {
                        acc
                    } else {
                        acc + Rat::from_integer(v[k].into()) * &inv[(k, j)]
                    }
                })
            })
            .collect()
    }

    /// Indices of all maximal cones containing `v`, in cone order.
    pub fn cones_containing(&self, v: &[i64]) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&c| self.barycentric(c, v).iter().all(|x| !x.is_negative()))
            .collect()
    }

    /// First maximal cone containing `v`.
    pub fn cone_containing(&self, v: &[i64]) -> Option<usize> {
        (0..self.cones.len()).find(|&c| self.barycentric(c, v).iter().all(|x| !x.is_negative()))
    }

    fn check_divisor(&self, d: &TorusDivisor) -> Result<(), FanError> {
        if d.len() != self.rays.len() {
            return Err(FanError::DimensionMismatch { expected: self.rays.len(), found: d.len() });
        }
        Ok(())
    }

    fn check_vec(&self, v: &LatticeVec) -> Result<(), FanError> {
        if v.dim() != self.dim {
            return Err(FanError::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        if v.is_zero() {
            return Err(FanError::ZeroVector);
        }
        Ok(())
    }
}

fn invert(m: &QMat) -> Option<QMat> {
    let n = m.rows();
    let mut inv = QMat::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        let LinearSolution::Unique(col) = solve_linear(m, &e).ok()? else {
            return None;
        };
        for i in 0..n {
            inv[(i, j)] = col[i].clone();
        }
    }
    Some(inv)
}

/// Exact structural checks: primitivity, simpliciality, facet pairing with
/// the two cones on opposite sides, and pairwise disjoint cone interiors.
pub fn validate_fan(fan: &Fan) -> FanDiagnostics {
    use FanViolation::*;
    let mut v = Vec::new();
    let n = fan.dim;
    if !(1..=MAX_DIM).contains(&n) {
        v.push(UnsupportedDimension(n));
        return FanDiagnostics { violations: v };
    }
    if fan.cones.is_empty() {
        v.push(NoCones);
    }
    for (i, r) in fan.rays.iter().enumerate() {
        if r.dim() != n {
            v.push(RayDimension { ray: i });
        } else if r.is_zero() {
            v.push(ZeroRay { ray: i });
        } else if !r.is_primitive() {
            v.push(NonPrimitive { ray: i });
        }
        if let Some(first) = fan.rays[..i].iter().position(|q| q == r) {
            v.push(DuplicateRay { ray: i, first });
        }
    }
    if !v.is_empty() {
        return FanDiagnostics { violations: v };
    }
    let mut structural_ok = true;
    for (ci, c) in fan.cones.iter().enumerate() {
        if c.len() != n {
            v.push(ConeSize { cone: ci });
            structural_ok = false;
        } else if c.iter().any(|&i| i >= fan.rays.len()) {
            v.push(ConeIndex { cone: ci });
            structural_ok = false;
        } else if c.windows(2).any(|w| w[0] == w[1]) {
            v.push(RepeatedRay { cone: ci });
            structural_ok = false;
        } else {
            let m = QMat::from_int_rows(&c.iter().map(|&i| fan.rays[i].0.clone()).collect::<Vec<_>>())
                .expect("equal lengths");
            if m.determinant().map_or(true, |d| d.is_zero()) {
                v.push(NotSimplicial { cone: ci });
                structural_ok = false;
            }
        }
        if let Some(first) = fan.cones[..ci].iter().position(|o| o == c) {
            v.push(DuplicateCone { cone: ci, first });
            structural_ok = false;
        }
    }
    if !structural_ok {
        return FanDiagnostics { violations: v };
    }
    for r in 0..fan.rays.len() {
        if !fan.cones.iter().any(|c| c.contains(&r)) {
            v.push(UnusedRay { ray: r });
        }
    }

    // Facet pairing.
    let mut facets: std::collections::BTreeMap<Vec<usize>, Vec<(usize, usize)>> = Default::default();
    for (ci, c) in fan.cones.iter().enumerate() {
        for drop in 0..n {
            let facet: Vec<usize> = c.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &i)| i).collect();
            facets.entry(facet).or_default().push((ci, c[drop]));
        }
    }
    for (facet, owners) in &facets {
        if owners.len() != 2 {
            v.push(UnpairedFacet { facet: facet.clone(), count: owners.len() });
            continue;
        }
        let gens: Vec<&[i64]> = facet.iter().map(|&i| fan.rays[i].coords()).collect();
        let normal = hyperplane_normal(&gens, n);
        let s1 = int_dot(&normal, fan.rays[owners[0].1].coords()).signum();
        let s2 = int_dot(&normal, fan.rays[owners[1].1].coords()).signum();
        if s1 * s2 >= 0 {
            v.push(FacetSameSide { facet: facet.clone() });
        }
    }

    // Interiors: λ ≥ 1, μ ≥ 1 with Σ λ_i u_i = Σ μ_j w_j is feasible iff
    // the open cones meet.
    for (a, b) in (0..fan.cones.len()).tuple_combinations() {
        if overlapping(fan, a, b) {
            v.push(OverlappingCones { a, b });
        }
    }
    FanDiagnostics { violations: v }
}

fn overlapping(fan: &Fan, a: usize, b: usize) -> bool {
    let n = fan.dim;
    let (ca, cb) = (&fan.cones[a], &fan.cones[b]);
    let vars = 2 * n;
    let mut cs = Vec::with_capacity(vars + n);
    for i in 0..vars {
        cs.push(Constraint::coordinate(vars, i, Relation::Ge, Rat::one()));
    }
    for k in 0..n {
        let mut row = Vec::with_capacity(vars);
        row.extend(ca.iter().map(|&i| Rat::from_integer(fan.rays[i].0[k].into())));
        row.extend(cb.iter().map(|&i| Rat::from_integer((-fan.rays[i].0[k]).into())));
        cs.push(Constraint::eq(row, Rat::zero()));
    }
    matches!(lp_feasible_point(vars, &cs), Ok(Some(_)))
}

/// Rational coefficient per ray of some fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusDivisor {
    #[serde(with = "crate::exact::serde_rat::vec")]
    pub coeffs: Vec<Rat>,
}

impl TorusDivisor {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        TorusDivisor { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        TorusDivisor { coeffs: coeffs.iter().map(|&a| Rat::from_integer(a.into())).collect() }
    }

    pub fn zero(n: usize) -> Self {
        TorusDivisor { coeffs: vec![Rat::zero(); n] }
    }

    /// `c` times the prime divisor of ray `i`.
    pub fn prime(n: usize, i: usize, c: Rat) -> Self {
        let mut d = Self::zero(n);
        d.coeffs[i] = c;
        d
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn add(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Rat) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn max(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.max(b).clone()).collect())
    }

    pub fn min(&self, other: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.min(b).clone()).collect())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &TorusDivisor) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    /// Pullback to a refinement `fine` of `coarse`: traces at the fine rays.
    pub fn pullback(&self, coarse: &Fan, fine: &Fan) -> Result<TorusDivisor, FanError> {
        fine.rays()
            .iter()
            .map(|r| trace_value(coarse, self, r))
            .collect::<Result<Vec<_>, _>>()
            .map(TorusDivisor::new)
    }
}

/// Per maximal cone `σ`, the `m_σ` with `⟨m_σ, v_ρ⟩ = -a_ρ` on the rays of `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub per_cone: Vec<Vec<Rat>>,
}

pub fn cartier_data(fan: &Fan, d: &TorusDivisor) -> Result<CartierData, FanError> {
    fan.check_divisor(d)?;
    let n = fan.dim;
    let per_cone = fan
        .cones
        .iter()
        .zip(fan.inverses())
        .map(|(c, inv)| {
            let rhs: Vec<Rat> = c.iter().map(|&i| -d.coeffs[i].clone()).collect();
            inv.mul_vec(&rhs).expect("square")
        })
        .collect::<Vec<_>>();
    debug_assert!(per_cone.iter().all(|m| m.len() == n));
    Ok(CartierData { per_cone })
}

/// Toric nefness: every `m_σ` satisfies `⟨m_σ, v_ρ⟩ ≥ -a_ρ` for every ray.
pub fn is_nef(fan: &Fan, d: &TorusDivisor) -> Result<bool, FanError> {
    let data = cartier_data(fan, d)?;
    Ok(data.per_cone.iter().all(|m| {
        fan.rays
            .iter()
            .zip(&d.coeffs)
            .all(|(r, a)| r.dot(m) >= -a.clone())
    }))
}

/// Coefficient of the valuation `v` in the pullback of `d`.
pub fn trace_value(fan: &Fan, d: &TorusDivisor, v: &LatticeVec) -> Result<Rat, FanError> {
    fan.check_divisor(d)?;
    fan.check_vec(v)?;
    let eval = |c: usize| -> Rat {
        fan.barycentric(c, v.coords())
            .iter()
            .zip(&fan.cones[c])
            .fold(Rat::zero(), |acc, (l, &i)| acc + l * &d.coeffs[i])
    };
    let containing = fan.cones_containing(v.coords());
    let first = *containing.first().ok_or_else(|| FanError::NotInSupport(v.clone()))?;
    let value = eval(first);
    debug_assert!(
        containing[1..].iter().all(|&c| eval(c) == value),
        "trace of {v} depends on the cone"
    );
    Ok(value)
}

/// Inserts the ray `w` and re-cones every maximal cone containing it.
///
/// Returns the subdivided fan and the index of the new ray (always last).
pub fn star_subdivide(fan: &Fan, w: &LatticeVec) -> Result<(Fan, usize), FanError> {
    fan.check_vec(w)?;
    if !w.is_primitive() {
        return Err(FanError::NonPrimitive(w.clone()));
    }
    if fan.ray_index(w).is_some() {
        return Err(FanError::AlreadyARay(w.clone()));
    }
    let new = fan.rays.len();
    let mut cones = Vec::with_capacity(fan.cones.len() + fan.dim);
    let mut touched = false;
    for (ci, c) in fan.cones.iter().enumerate() {
        let lambda = fan.barycentric(ci, w.coords());
        if lambda.iter().any(Signed::is_negative) {
            cones.push(c.clone());
            continue;
        }
        touched = true;
        for (k, l) in lambda.iter().enumerate() {
            if l.is_positive() {
                let mut nc = c.clone();
                nc[k] = new;
                nc.sort_unstable();
                cones.push(nc);
            }
        }
    }
    if !touched {
        return Err(FanError::NotInSupport(w.clone()));
    }
    let mut rays = fan.rays.clone();
    rays.push(w.clone());
    Ok((Fan::from_parts_unchecked(rays, cones), new))
}

/// `{ m : ⟨m, v_ρ⟩ ≥ -k a_ρ for every ray ρ }`, whose lattice points are
/// the sections of `kD`.
pub fn section_polytope(fan: &Fan, d: &TorusDivisor, k: i64) -> Result<QPolytope, FanError> {
    fan.check_divisor(d)?;
    assert!(k > 0, "section_polytope needs k > 0");
    let kq = Rat::from_integer(k.into());
    let hs = fan
        .rays
        .iter()
        .zip(&d.coeffs)
        .map(|(r, a)| Halfspace::new(r.0.clone(), -(a * &kq)))
        .collect();
    Ok(QPolytope::from_halfspaces(fan.dim, hs)?)
}

/// Bigness: the section polytope is full dimensional.
pub fn is_big(fan: &Fan, d: &TorusDivisor) -> Result<bool, FanError> {
    Ok(section_polytope(fan, d, 1)?.is_full_dimensional()?)
}

/// Ray indices of a complete 2-dimensional fan in counterclockwise order.
pub fn ccw_rays(fan: &Fan) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fan.rays.len()).collect();
    idx.sort_by(|&a, &b| angle_cmp(fan.rays[a].coords(), fan.rays[b].coords()));
    idx
}

/// Intersection matrix of the boundary curves of a smooth complete toric
/// surface, indexed like the rays.
pub fn surface_intersection(fan: &Fan) -> Result<QMat, FanError> {
    if fan.dim != 2 {
        return Err(FanError::UnsupportedDimension(fan.dim));
    }
    for c in &fan.cones {
        let (a, b) = (fan.rays[c[0]].coords(), fan.rays[c[1]].coords());
        let det = a[0] * b[1] - a[1] * b[0];
        if det.abs() != 1 {
            return Err(FanError::NonSmooth(format!("cone {c:?} has determinant {det}")));
        }
    }
    let order = ccw_rays(fan);
    let r = order.len();
    let mut m = QMat::zeros(r, r);
    for (pos, &i) in order.iter().enumerate() {
        let prev = order[(pos + r - 1) % r];
        let next = order[(pos + 1) % r];
        if !fan.spans_cone(prev, i) || !fan.spans_cone(i, next) {
            return Err(FanError::NonSmooth("cones are not consecutive rays".into()));
        }
        let s = fan.rays[prev].add(&fan.rays[next]);
        let v = fan.rays[i].coords();
        let k = if v[0] != 0 { 0 } else { 1 };
        let c = s.0[k] / v[k];
        if s.0[k] % v[k] != 0 || fan.rays[i].scale(c) != s {
            return Err(FanError::NonSmooth(format!("ray {i} has no integral self-intersection")));
        }
        m[(i, i)] = Rat::from_integer((-c).into());
        m[(i, prev)] = Rat::one();
        m[(prev, i)] = Rat::one();
    }
    Ok(m)
}

/// Complete plane fan whose cones join angularly consecutive rays.
pub fn complete_plane_fan(rays: Vec<LatticeVec>) -> Result<Fan, FanError> {
    let tmp = Fan::from_parts_unchecked(rays.clone(), Vec::new());
    let order = ccw_rays(&tmp);
    let r = order.len();
    let cones = (0..r).map(|p| vec![order[p], order[(p + 1) % r]]).collect();
    Fan::new(rays, cones)
}
