use std::fmt;

use super::{ExactError, ExactField};

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Outcome of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution<T> {
    Unique(Vec<T>),
    /// Consistent but rank deficient. `particular` sets every free variable
    /// to zero.
    Underdetermined { particular: Vec<T>, rank: usize },
    NoSolution,
}

impl<T> LinearSolution<T> {
    pub fn unique(self) -> Option<Vec<T>> {
        match self {
            LinearSolution::Unique(x) => Some(x),
            _ => None,
        }
    }
}

impl<T: ExactField> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(ExactError::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self, ExactError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&a| T::from_int(a)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>, ExactError> {
        if x.len() != self.cols {
            return Err(ExactError::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows).map(|i| super::dot(self.row(i), x)).collect())
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self, pivot_limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_limit {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = T::one() / self[(r, c)].clone();
            for j in c..self.cols {
                let v = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    let v = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let cols = m.cols;
        m.rref(cols).len()
    }

    /// Determinant by Gaussian elimination.
    pub fn determinant(&self) -> Result<T, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(T::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / piv.clone();
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        Ok(det)
    }

    /// Leading principal minors `det(A[0..k, 0..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Result<Vec<T>, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        (1..=self.rows)
            .map(|k| self.principal_submatrix(&(0..k).collect::<Vec<_>>()).determinant())
            .collect()
    }

    /// Coefficients of `det(xI - A)`, constant term first, via Faddeev-LeVerrier.
    pub fn characteristic_polynomial(&self) -> Result<Vec<T>, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut coeffs = vec![T::zero(); n + 1];
        coeffs[n] = T::one();
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.matmul(&m);
            for i in 0..n {
                next[(i, i)] = next[(i, i)].clone() + coeffs[n - k + 1].clone();
            }
            let am = self.matmul(&next);
            let trace = (0..n).fold(T::zero(), |acc, i| acc + am[(i, i)].clone());
            coeffs[n - k] = -trace / T::from_int(k as i64);
            m = next;
        }
        Ok(coeffs)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + self[(i, k)].clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    /// Number of positive eigenvalues of a symmetric matrix.
    ///
    /// The characteristic polynomial of a symmetric matrix is real-rooted, so
    /// Descartes' sign count is exact once the zero roots are factored out.
    pub fn positive_eigenvalue_count(&self) -> Result<usize, ExactError> {
        if !self.is_symmetric() {
            return Err(ExactError::NotSymmetric);
        }
        let coeffs = self.characteristic_polynomial()?;
        let signs: Vec<bool> = coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.is_positive())
            .collect();
        Ok(signs.windows(2).filter(|w| w[0] != w[1]).count())
    }
}

/// Solves `A x = b` exactly by Gauss-Jordan elimination.
pub fn solve_linear<T: ExactField>(a: &Matrix<T>, b: &[T]) -> Result<LinearSolution<T>, ExactError> {
    if b.len() != a.rows {
        return Err(ExactError::DimensionMismatch { expected: a.rows, found: b.len() });
    }
    let n = a.cols;
    let mut aug = Matrix::zeros(a.rows, n + 1);
    for i in 0..a.rows {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let pivots = aug.rref(n);
    let rank = pivots.len();
    if (rank..aug.rows).any(|i| !aug[(i, n)].is_zero()) {
        return Ok(LinearSolution::NoSolution);
    }
    let mut x = vec![T::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[(r, n)].clone();
    }
    debug_assert_eq!(a.mul_vec(&x).as_deref(), Ok(b));
    if rank < n {
        Ok(LinearSolution::Underdetermined { particular: x, rank })
    } else {
        Ok(LinearSolution::Unique(x))
    }
}

/// Sylvester's criterion: `(-1)^k` times the k-th leading minor is positive for all k.
pub fn is_negative_definite<T: ExactField>(a: &Matrix<T>) -> Result<bool, ExactError> {
    if !a.is_symmetric() {
        return Err(ExactError::NotSymmetric);
    }
    let minors = a.leading_minors()?;
    Ok(minors
        .iter()
        .enumerate()
        .all(|(k, m)| if k % 2 == 0 { m.is_negative() } else { m.is_positive() }))
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
