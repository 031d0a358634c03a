use std::borrow::Cow;

use itertools::Itertools;

use super::lp::{lp_feasible_point, lp_optimum, Constraint, LpOutcome, Relation};
use super::matrix::{solve_linear, LinearSolution, Matrix};
use super::{dot_int, ExactError, ExactField};

/// Vertex and lattice operations are limited to this ambient dimension.
pub const MAX_DIM: usize = 3;

/// The half-space `⟨normal, m⟩ ≥ offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace<T> {
    pub normal: Vec<i64>,
    pub offset: T,
}

impl<T: ExactField> Halfspace<T> {
    pub fn new(normal: Vec<i64>, offset: T) -> Self {
        Halfspace { normal, offset }
    }

    pub fn contains(&self, m: &[T]) -> bool {
        dot_int(&self.normal, m) >= self.offset
    }
}

/// A convex polytope held by half-spaces, vertices, or both.
///
/// Lower-dimensional and empty polytopes are ordinary values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope<T> {
    dim: usize,
    h_rep: Option<Vec<Halfspace<T>>>,
    v_rep: Option<Vec<Vec<T>>>,
}

impl<T: ExactField> Polytope<T> {
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace<T>>) -> Result<Self, ExactError> {
        if let Some(h) = halfspaces.iter().find(|h| h.normal.len() != dim) {
            return Err(ExactError::DimensionMismatch { expected: dim, found: h.normal.len() });
        }
        Ok(Polytope { dim, h_rep: Some(halfspaces), v_rep: None })
    }

    /// Convex hull of a point set; the vertex list is minimal and sorted.
    pub fn from_points(dim: usize, points: &[Vec<T>]) -> Result<Self, ExactError> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(ExactError::DimensionMismatch { expected: dim, found: p.len() });
        }
        let v = if points.is_empty() { Vec::new() } else { convex_hull(points)? };
        Ok(Polytope { dim, h_rep: None, v_rep: Some(v) })
    }

    pub fn empty(dim: usize) -> Self {
        Polytope { dim, h_rep: None, v_rep: Some(Vec::new()) }
    }

    pub fn point(p: Vec<T>) -> Self {
        Polytope { dim: p.len(), h_rep: None, v_rep: Some(vec![p]) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> Option<&[Halfspace<T>]> {
        self.h_rep.as_deref()
    }

    /// Fills in the vertex list, enumerating it from the half-spaces if needed.
    pub fn with_vertices(mut self) -> Result<Self, ExactError> {
        if self.v_rep.is_none() {
            self.v_rep = Some(self.enumerate_vertices()?);
        }
        Ok(self)
    }

    pub fn vertices(&self) -> Result<Cow<'_, [Vec<T>]>, ExactError> {
        match &self.v_rep {
            Some(v) => Ok(Cow::Borrowed(v)),
            None => Ok(Cow::Owned(self.enumerate_vertices()?)),
        }
    }

    pub fn is_empty(&self) -> Result<bool, ExactError> {
        Ok(self.vertices()?.is_empty())
    }

    /// Dimension of the affine hull; `None` for the empty polytope.
    pub fn affine_dim(&self) -> Result<Option<usize>, ExactError> {
        let v = self.vertices()?;
        let Some(base) = v.first() else {
            return Ok(None);
        };
        let rows: Vec<Vec<T>> = v[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| a.clone() - b.clone()).collect())
            .collect();
        if rows.is_empty() {
            return Ok(Some(0));
        }
        Ok(Some(Matrix::from_rows(rows)?.rank()))
    }

    pub fn is_full_dimensional(&self) -> Result<bool, ExactError> {
        Ok(self.affine_dim()? == Some(self.dim))
    }

    pub fn contains(&self, m: &[T]) -> Result<bool, ExactError> {
        if m.len() != self.dim {
            return Err(ExactError::DimensionMismatch { expected: self.dim, found: m.len() });
        }
        if let Some(h) = &self.h_rep {
            return Ok(h.iter().all(|h| h.contains(m)));
        }
        let v = self.v_rep.as_ref().expect("polytope without representation");
        in_hull(v, m)
    }

    /// The dilate `factor · P` for `factor ≥ 0`.
    pub fn scaled(&self, factor: &T) -> Result<Self, ExactError> {
        assert!(!factor.is_negative(), "negative dilation factor");
        if factor.is_zero() {
            return Ok(if self.is_empty()? {
                Self::empty(self.dim)
            } else {
                Self::point(vec![T::zero(); self.dim])
            });
        }
        Ok(Polytope {
            dim: self.dim,
            h_rep: self.h_rep.as_ref().map(|hs| {
                hs.iter()
                    .map(|h| Halfspace::new(h.normal.clone(), h.offset.clone() * factor.clone()))
                    .collect()
            }),
            v_rep: self.v_rep.as_ref().map(|vs| {
                vs.iter()
                    .map(|v| v.iter().map(|x| x.clone() * factor.clone()).collect())
                    .collect()
            }),
        })
    }

    /// `min { ⟨m, v⟩ : m ∈ P }`, attained at a vertex.
    pub fn support_eval(&self, v: &[i64]) -> Result<T, ExactError> {
        if v.len() != self.dim {
            return Err(ExactError::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        self.vertices()?
            .iter()
            .map(|m| dot_int(v, m))
            .min()
            .ok_or(ExactError::EmptyPolytope)
    }

    /// All integer points, sorted lexicographically.
    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>, ExactError> {
        let verts = self.vertices()?;
        if verts.is_empty() {
            return Ok(Vec::new());
        }
        let mut ranges = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let lo = verts.iter().map(|v| &v[i]).min().unwrap();
            let hi = verts.iter().map(|v| &v[i]).max().unwrap();
            let lo = lo.ceil_int().ok_or(ExactError::Overflow)?;
            let hi = hi.floor_int().ok_or(ExactError::Overflow)?;
            if lo > hi {
                return Ok(Vec::new());
            }
            ranges.push(lo..=hi);
        }
        let mut out = Vec::new();
        for p in ranges.into_iter().multi_cartesian_product() {
            let pf: Vec<T> = p.iter().map(|&a| T::from_int(a)).collect();
            if self.contains(&pf)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn enumerate_vertices(&self) -> Result<Vec<Vec<T>>, ExactError> {
        if self.dim > MAX_DIM {
            return Err(ExactError::UnsupportedDimension(self.dim));
        }
        let hs = self.h_rep.as_ref().expect("polytope without representation");
        let n = self.dim;
        if n == 0 {
            return Ok(if hs.iter().all(|h| h.contains(&[])) { vec![vec![]] } else { vec![] });
        }
        let mut verts: Vec<Vec<T>> = Vec::new();
        for combo in (0..hs.len()).combinations(n) {
            let a: Matrix<T> = Matrix::from_int_rows(
                &combo.iter().map(|&i| hs[i].normal.clone()).collect::<Vec<_>>(),
            )?;
            let b: Vec<T> = combo.iter().map(|&i| hs[i].offset.clone()).collect();
            if let LinearSolution::Unique(x) = solve_linear(&a, &b)? {
                if hs.iter().all(|h| h.contains(&x)) {
                    verts.push(x);
                }
            }
        }
        verts.sort();
        verts.dedup();
        if verts.is_empty() {
            let cs: Vec<Constraint<T>> = hs
                .iter()
                .map(|h| Constraint::ge(super::to_field(&h.normal), h.offset.clone()))
                .collect();
            return match lp_feasible_point(n, &cs)? {
                Some(_) => Err(ExactError::Unbounded),
                None => Ok(verts),
            };
        }
        if !recession_cone_trivial(n, hs)? {
            return Err(ExactError::Unbounded);
        }
        Ok(verts)
    }
}

fn recession_cone_trivial<T: ExactField>(n: usize, hs: &[Halfspace<T>]) -> Result<bool, ExactError> {
    let mut cs: Vec<Constraint<T>> = hs
        .iter()
        .map(|h| Constraint::ge(super::to_field(&h.normal), T::zero()))
        .collect();
    for i in 0..n {
        cs.push(Constraint::coordinate(n, i, Relation::Ge, -T::one()));
        cs.push(Constraint::coordinate(n, i, Relation::Le, T::one()));
    }
    for i in 0..n {
        for sign in [T::one(), -T::one()] {
            let mut obj = vec![T::zero(); n];
            obj[i] = sign;
            if let LpOutcome::Optimal { value, .. } = lp_optimum(&obj, &cs)? {
                if value.is_positive() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn cross2<T: ExactField>(o: &[T], a: &[T], b: &[T]) -> T {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

/// Membership of `m` in the convex hull of `points`, as an LP feasibility problem.
fn in_hull<T: ExactField>(points: &[Vec<T>], m: &[T]) -> Result<bool, ExactError> {
    match points.len() {
        0 => return Ok(false),
        1 => return Ok(points[0].as_slice() == m),
        _ => {}
    }
    let k = points.len();
    let dim = m.len();
    let mut cs = Vec::with_capacity(k + dim + 1);
    for i in 0..k {
        cs.push(Constraint::coordinate(k, i, Relation::Ge, T::zero()));
    }
    cs.push(Constraint::eq(vec![T::one(); k], T::one()));
    for d in 0..dim {
        cs.push(Constraint::eq(points.iter().map(|p| p[d].clone()).collect(), m[d].clone()));
    }
    Ok(lp_feasible_point(k, &cs)?.is_some())
}

/// Minimal vertex set of the convex hull of `points` (dimension ≤ 3),
/// sorted lexicographically.
pub fn convex_hull<T: ExactField>(points: &[Vec<T>]) -> Result<Vec<Vec<T>>, ExactError> {
    let Some(first) = points.first() else {
        return Err(ExactError::EmptyPolytope);
    };
    let dim = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(ExactError::DimensionMismatch { expected: dim, found: p.len() });
    }
    if dim > MAX_DIM {
        return Err(ExactError::UnsupportedDimension(dim));
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(pts);
    }
    let mut hull = match dim {
        0 => unreachable!(),
        1 => vec![pts[0].clone(), pts[pts.len() - 1].clone()],
        2 => monotone_chain(&pts),
        _ => {
            let mut keep = Vec::new();
            for (i, p) in pts.iter().enumerate() {
                let others: Vec<Vec<T>> = pts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, q)| q.clone())
                    .collect();
                if !in_hull(&others, p)? {
                    keep.push(p.clone());
                }
            }
            keep
        }
    };
    hull.sort();
    Ok(hull)
}

/// Andrew's monotone chain on sorted, deduplicated points; drops collinear
/// points. Output is counterclockwise starting from the smallest point.
fn monotone_chain<T: ExactField>(pts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut lower: Vec<Vec<T>> = Vec::new();
    for p in pts {
        while lower.len() >= 2
            && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= T::zero()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<T>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= T::zero()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Counterclockwise order of a 2-dimensional vertex list.
pub fn ccw_order<T: ExactField>(vertices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut pts = vertices.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    monotone_chain(&pts)
}
