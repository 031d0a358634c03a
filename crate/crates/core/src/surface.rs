//! Zariski decomposition on an abstract surface.
//!
//! A surface is described only by a finite list of curves and their
//! intersection matrix; nefness means non-negative intersection with every
//! listed curve. [`zariski_decompose`] grows the support of the negative
//! part until the remainder is nef. [`maximality_oracle`] computes the
//! maximal nef subdivisor coefficientwise by linear programming and must
//! agree with it exactly.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{
    is_negative_definite, lp_optimum, solve_linear, Constraint, ExactError, LinearSolution,
    LpOutcome, Relation,
};
use crate::{QMat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("divisor has a negative coefficient")]
    NonEffectiveInput,
    #[error("input is not realizable surface data: {0}")]
    InvalidGeometry(String),
    #[error("intersection matrix is not symmetric")]
    NotSymmetric,
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Plausibility findings that do not stop a computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceWarning {
    /// Hodge index allows at most one positive eigenvalue.
    HodgeIndex { positive_eigenvalues: usize },
    /// Distinct irreducible curves meet non-negatively.
    NegativeOffDiagonal { i: usize, j: usize },
}

impl std::fmt::Display for SurfaceWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceWarning::HodgeIndex { positive_eigenvalues } => write!(
                f,
                "intersection matrix has {positive_eigenvalues} positive eigenvalues (at most 1 expected)"
            ),
            SurfaceWarning::NegativeOffDiagonal { i, j } => {
                write!(f, "curves {i} and {j} have negative intersection")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    curves: Vec<String>,
    intersection: QMat,
    warnings: Vec<SurfaceWarning>,
}

impl SurfaceModel {
    pub fn new(curves: Vec<String>, intersection: QMat) -> Result<Self, SurfaceError> {
        let n = curves.len();
        if intersection.rows() != n || intersection.cols() != n {
            return Err(SurfaceError::DimensionMismatch {
                expected: n,
                found: intersection.rows().max(intersection.cols()),
            });
        }
        if !intersection.is_symmetric() {
            return Err(SurfaceError::NotSymmetric);
        }
        let mut warnings = Vec::new();
        let positive = intersection.positive_eigenvalue_count()?;
        if positive > 1 {
            warnings.push(SurfaceWarning::HodgeIndex { positive_eigenvalues: positive });
        }
        for i in 0..n {
            for j in 0..i {
                if intersection[(i, j)].is_negative() {
                    warnings.push(SurfaceWarning::NegativeOffDiagonal { i: j, j: i });
                }
            }
        }
        Ok(SurfaceModel { curves, intersection, warnings })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[String] {
        &self.curves
    }

    pub fn intersection(&self) -> &QMat {
        &self.intersection
    }

    pub fn warnings(&self) -> &[SurfaceWarning] {
        &self.warnings
    }

    /// `(D·C_i)_i`.
    pub fn intersection_numbers(&self, d: &SurfaceDivisor) -> Vec<Rat> {
        self.intersection.mul_vec(&d.coeffs).expect("divisor length checked")
    }

    fn check(&self, d: &SurfaceDivisor) -> Result<(), SurfaceError> {
        if d.len() != self.len() {
            return Err(SurfaceError::DimensionMismatch { expected: self.len(), found: d.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceDivisor {
    pub coeffs: Vec<Rat>,
}

impl SurfaceDivisor {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        SurfaceDivisor { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        SurfaceDivisor { coeffs: vec![Rat::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &SurfaceDivisor) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    pub fn sub(&self, other: &SurfaceDivisor) -> SurfaceDivisor {
        SurfaceDivisor::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &SurfaceDivisor) -> SurfaceDivisor {
        SurfaceDivisor::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn max(&self, other: &SurfaceDivisor) -> SurfaceDivisor {
        SurfaceDivisor::new(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.max(b).clone()).collect(),
        )
    }

    /// Indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }
}

/// The checks that certify a decomposition, recorded at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// `P·C_i` for every curve.
    pub nef_values: Vec<Rat>,
    /// `(i, P·C_i)` for `i` in the support of `N`.
    pub orthogonality: Vec<(usize, Rat)>,
    pub support_negative_definite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub positive: SurfaceDivisor,
    pub negative: SurfaceDivisor,
    /// Index set on which `N` is allowed to live; sorted.
    pub support: Vec<usize>,
    pub certificate: Certificate,
}

impl Decomposition {
    fn new(s: &SurfaceModel, positive: SurfaceDivisor, negative: SurfaceDivisor, support: Vec<usize>) -> Result<Self, SurfaceError> {
        let nef_values = s.intersection_numbers(&positive);
        let orthogonality = support.iter().map(|&i| (i, nef_values[i].clone())).collect();
        let support_negative_definite = support.is_empty()
            || is_negative_definite(&s.intersection.principal_submatrix(&support))?;
        Ok(Decomposition {
            positive,
            negative,
            support,
            certificate: Certificate { nef_values, orthogonality, support_negative_definite },
        })
    }
}

/// `P·C_i ≥ 0` for every listed curve.
pub fn is_nef_on_span(s: &SurfaceModel, p: &SurfaceDivisor) -> bool {
    p.len() == s.len() && s.intersection_numbers(p).iter().all(|x| !x.is_negative())
}

/// Zariski decomposition by growing the support of the negative part.
///
/// Each round solves `N·C_i = D·C_i` for `i` in the current support `T`
/// with `N` supported on `T`, then adds every curve that `D - N` meets
/// negatively. `T` grows strictly, so at most `n` rounds run.
pub fn zariski_decompose(s: &SurfaceModel, d: &SurfaceDivisor) -> Result<Decomposition, SurfaceError> {
    s.check(d)?;
    if !d.is_effective() {
        return Err(SurfaceError::NonEffectiveInput);
    }
    let n = s.len();
    let d_dot = s.intersection_numbers(d);
    let mut support: Vec<usize> = Vec::new();
    let mut rounds = 0;
    loop {
        let mut negative = SurfaceDivisor::zero(n);
        if !support.is_empty() {
            let block = s.intersection.principal_submatrix(&support);
            if !is_negative_definite(&block)? {
                return Err(SurfaceError::InvalidGeometry(format!(
                    "support {support:?} is not negative definite"
                )));
            }
            let rhs: Vec<Rat> = support.iter().map(|&i| d_dot[i].clone()).collect();
            let x = match solve_linear(&block, &rhs)? {
                LinearSolution::Unique(x) => x,
                _ => unreachable!("negative definite block is invertible"),
            };
            for (&i, v) in support.iter().zip(x) {
                negative.coeffs[i] = v;
            }
            if !negative.is_effective() || !negative.le(d) {
                return Err(SurfaceError::InvalidGeometry(format!(
                    "negative part leaves [0, D] on support {support:?}"
                )));
            }
        }
        let positive = d.sub(&negative);
        let p_dot = s.intersection_numbers(&positive);
        let grow: Vec<usize> = (0..n)
            .filter(|i| p_dot[*i].is_negative() && !support.contains(i))
            .collect();
        if grow.is_empty() {
            return Decomposition::new(s, positive, negative, support);
        }
        support.extend(grow);
        support.sort_unstable();
        rounds += 1;
        assert!(rounds <= n, "support failed to stabilize");
    }
}

/// Maximal nef subdivisor, one LP per coefficient:
/// `max x_i` subject to `0 ≤ x ≤ D` and `x·C_j ≥ 0` for all `j`.
pub fn maximality_oracle(s: &SurfaceModel, d: &SurfaceDivisor) -> Result<SurfaceDivisor, SurfaceError> {
    s.check(d)?;
    if !d.is_effective() {
        return Err(SurfaceError::NonEffectiveInput);
    }
    let n = s.len();
    let mut cs = Vec::with_capacity(3 * n);
    for i in 0..n {
        cs.push(Constraint::coordinate(n, i, Relation::Ge, Rat::zero()));
        cs.push(Constraint::coordinate(n, i, Relation::Le, d.coeffs[i].clone()));
    }
    let m = s.intersection();
    for j in 0..n {
        cs.push(Constraint::ge((0..n).map(|i| m[(i, j)].clone()).collect(), Rat::zero()));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut obj = vec![Rat::zero(); n];
        obj[i] = Rat::from_integer(1.into());
        match lp_optimum(&obj, &cs)? {
            LpOutcome::Optimal { value, .. } => out.push(value),
            other => unreachable!("bounded feasible LP returned {other:?}"),
        }
    }
    Ok(SurfaceDivisor::new(out))
}

/// Re-checks a decomposition from scratch, ignoring the stored certificate.
pub fn verify_certificate(s: &SurfaceModel, d: &SurfaceDivisor, dec: &Decomposition) -> bool {
    let n = s.len();
    let (p, neg) = (&dec.positive, &dec.negative);
    if d.len() != n || p.len() != n || neg.len() != n {
        return false;
    }
    if p.add(neg) != *d {
        return false;
    }
    let zero = SurfaceDivisor::zero(n);
    if !(zero.le(p) && p.le(d) && zero.le(neg) && neg.le(d)) {
        return false;
    }
    if dec.support.iter().any(|&i| i >= n) {
        return false;
    }
    if neg.support().iter().any(|i| !dec.support.contains(i)) {
        return false;
    }
    let p_dot = s.intersection_numbers(p);
    if p_dot.iter().any(Signed::is_negative) {
        return false;
    }
    if dec.support.iter().any(|&i| !p_dot[i].is_zero()) {
        return false;
    }
    dec.support.is_empty()
        || is_negative_definite(&s.intersection.principal_submatrix(&dec.support)).unwrap_or(false)
}
