//! Exact two-phase simplex over free variables.
//!
//! Pivoting follows Bland's rule in both phases, so the method cannot cycle.
//! [`lp_maximize`] additionally refines the optimum to the lexicographically
//! smallest optimal point, making the reported argument independent of the
//! pivot path.

use super::{dot, ExactError, ExactField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `⟨coeffs, x⟩ relation rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: ExactField> Constraint<T> {
    pub fn new(coeffs: Vec<T>, relation: Relation, rhs: T) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn le(coeffs: Vec<T>, rhs: T) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn ge(coeffs: Vec<T>, rhs: T) -> Self {
        Self::new(coeffs, Relation::Ge, rhs)
    }

    pub fn eq(coeffs: Vec<T>, rhs: T) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    /// `x_i relation rhs` in an `n`-variable problem.
    pub fn coordinate(n: usize, i: usize, relation: Relation, rhs: T) -> Self {
        let mut coeffs = vec![T::zero(); n];
        coeffs[i] = T::one();
        Self::new(coeffs, relation, rhs)
    }

    pub fn is_satisfied(&self, x: &[T]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<T> {
    Optimal { value: T, point: Vec<T> },
    Unbounded,
    Infeasible,
}

impl<T> LpOutcome<T> {
    pub fn optimum(&self) -> Option<&T> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Maximizes without lexicographic refinement; the point is some optimal
/// vertex, not a canonical one.
pub fn lp_optimum<T: ExactField>(
    objective: &[T],
    constraints: &[Constraint<T>],
) -> Result<LpOutcome<T>, ExactError> {
    check_dims(objective.len(), constraints)?;
    Ok(simplex(objective, constraints))
}

/// Maximizes `objective · x` over free variables `x` subject to `constraints`.
///
/// The returned point is the lexicographically smallest optimal point. When
/// some coordinate is unbounded below on the optimal face it is pinned at the
/// value reached so far and refinement continues with the next coordinate.
pub fn lp_maximize<T: ExactField>(
    objective: &[T],
    constraints: &[Constraint<T>],
) -> Result<LpOutcome<T>, ExactError> {
    let n = objective.len();
    check_dims(n, constraints)?;
    let (value, mut point) = match simplex(objective, constraints) {
        LpOutcome::Optimal { value, point } => (value, point),
        other => return Ok(other),
    };
    let mut pinned: Vec<Constraint<T>> = constraints.to_vec();
    pinned.push(Constraint::eq(objective.to_vec(), value.clone()));
    for i in 0..n {
        let mut coord = vec![T::zero(); n];
        coord[i] = -T::one();
        match simplex(&coord, &pinned) {
            LpOutcome::Optimal { value: v, point: p } => {
                point = p;
                pinned.push(Constraint::coordinate(n, i, Relation::Eq, -v));
            }
            LpOutcome::Unbounded => {
                pinned.push(Constraint::coordinate(n, i, Relation::Eq, point[i].clone()));
            }
            LpOutcome::Infeasible => unreachable!("optimal face became infeasible"),
        }
    }
    debug_assert!(constraints.iter().all(|c| c.is_satisfied(&point)));
    debug_assert_eq!(dot(objective, &point), value);
    Ok(LpOutcome::Optimal { value, point })
}

/// Some feasible point of the constraint system, or `None` when infeasible.
pub fn lp_feasible_point<T: ExactField>(
    n: usize,
    constraints: &[Constraint<T>],
) -> Result<Option<Vec<T>>, ExactError> {
    check_dims(n, constraints)?;
    match simplex(&vec![T::zero(); n], constraints) {
        LpOutcome::Optimal { point, .. } => Ok(Some(point)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
    }
}

fn check_dims<T>(n: usize, constraints: &[Constraint<T>]) -> Result<(), ExactError> {
    match constraints.iter().find(|c| c.coeffs.len() != n) {
        Some(c) => Err(ExactError::DimensionMismatch { expected: n, found: c.coeffs.len() }),
        None => Ok(()),
    }
}

struct Tableau<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    /// Reduced costs `c_j - c_B B^{-1} A_j` of the maximization problem.
    cost: Vec<T>,
    value: T,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<T: ExactField> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = T::one() / self.a[r][c].clone();
        for x in self.a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        self.b[r] = self.b[r].clone() * inv;
        let pivot_row = self.a[r].clone();
        let pivot_rhs = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for (x, p) in self.a[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
            self.b[i] = self.b[i].clone() - f * pivot_rhs.clone();
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
            self.value = self.value.clone() + f * pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, lowest-index basic
    /// variable among ratio-test ties.
    fn run(&mut self, allowed: usize) -> Phase {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.cost[j].is_positive()) else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][c].is_positive() {
                    continue;
                }
                let ratio = self.b[i].clone() / self.a[i][c].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Phase::Unbounded,
            }
        }
    }
}

/// Plain two-phase simplex; returns whichever optimal vertex Bland's rule reaches.
pub(crate) fn simplex<T: ExactField>(objective: &[T], constraints: &[Constraint<T>]) -> LpOutcome<T> {
    let n = objective.len();
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let structural = 2 * n + slack_count;
    let width = structural + m;

    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut slack = 2 * n;
    for (i, c) in constraints.iter().enumerate() {
        let flip = c.rhs.is_negative();
        let sign = |x: T| if flip { -x } else { x };
        let mut row = vec![T::zero(); width];
        for (j, x) in c.coeffs.iter().enumerate() {
            row[j] = sign(x.clone());
            row[n + j] = sign(-x.clone());
        }
        match c.relation {
            Relation::Le => {
                row[slack] = sign(T::one());
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = sign(-T::one());
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[structural + i] = T::one();
        a.push(row);
        b.push(sign(c.rhs.clone()));
    }

    // Phase 1: maximize minus the sum of artificials.
    let mut cost = vec![T::zero(); width];
    let mut value = T::zero();
    for i in 0..m {
        for j in 0..structural {
            cost[j] = cost[j].clone() + a[i][j].clone();
        }
        value = value - b[i].clone();
    }
    let mut t = Tableau { a, b, cost, value, basis: (structural..width).collect() };
    t.run(structural);
    if t.value.is_negative() {
        return LpOutcome::Infeasible;
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.a.len() {
        if t.basis[i] >= structural {
            match (0..structural).find(|&j| !t.a[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.a.remove(i);
                    t.b.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    for row in t.a.iter_mut() {
        row.truncate(structural);
    }

    // Phase 2.
    let mut c = vec![T::zero(); structural];
    for j in 0..n {
        c[j] = objective[j].clone();
        c[n + j] = -objective[j].clone();
    }
    t.cost = c.clone();
    t.value = T::zero();
    for (i, &bj) in t.basis.iter().enumerate() {
        if c[bj].is_zero() {
            continue;
        }
        for j in 0..structural {
            t.cost[j] = t.cost[j].clone() - c[bj].clone() * t.a[i][j].clone();
        }
        t.value = t.value.clone() + c[bj].clone() * t.b[i].clone();
    }
    if let Phase::Unbounded = t.run(structural) {
        return LpOutcome::Unbounded;
    }

    let mut y = vec![T::zero(); structural];
    for (i, &bj) in t.basis.iter().enumerate() {
        y[bj] = t.b[i].clone();
    }
    let point: Vec<T> = (0..n).map(|j| y[j].clone() - y[n + j].clone()).collect();
    LpOutcome::Optimal { value: t.value, point }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn q(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn box1(n: usize, i: usize, lo: i64, hi: i64) -> [Constraint<Rat>; 2] {
        [
            Constraint::coordinate(n, i, Relation::Ge, q(lo, 1)),
            Constraint::coordinate(n, i, Relation::Le, q(hi, 1)),
        ]
    }

    #[test]
    fn interval() {
        let out = lp_maximize(&[q(1, 1)], &box1(1, 0, 0, 2)).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: q(2, 1), point: vec![q(2, 1)] });
    }

    #[test]
    fn forced_to_zero() {
        let mut cs = box1(1, 0, 0, 2).to_vec();
        cs.push(Constraint::ge(vec![q(-1, 1)], q(0, 1)));
        let out = lp_maximize(&[q(1, 1)], &cs).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: q(0, 1), point: vec![q(0, 1)] });
    }

    #[test]
    fn binding_diagonal() {
        let mut cs = box1(2, 0, 0, 1).to_vec();
        cs.extend(box1(2, 1, 0, 1));
        cs.push(Constraint::ge(vec![q(-2, 1), q(1, 1)], q(0, 1)));
        let out = lp_maximize(&[q(1, 1), q(0, 1)], &cs).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal { value: q(1, 2), point: vec![q(1, 2), q(1, 1)] }
        );
    }

    #[test]
    fn unbounded_and_infeasible() {
        let cs = [Constraint::coordinate(1, 0, Relation::Ge, q(0, 1))];
        assert_eq!(lp_maximize(&[q(1, 1)], &cs).unwrap(), LpOutcome::Unbounded);
        let cs = [
            Constraint::coordinate(1, 0, Relation::Ge, q(1, 1)),
            Constraint::coordinate(1, 0, Relation::Le, q(0, 1)),
        ];
        assert_eq!(lp_maximize(&[q(1, 1)], &cs).unwrap(), LpOutcome::Infeasible);
        assert!(lp_feasible_point(1, &cs).unwrap().is_none());
    }

    #[test]
    fn lexicographic_tie_break() {
        // max x + y on the unit square's diagonal edge x + y <= 1: every
        // point of the edge is optimal, smallest is (0, 1).
        let mut cs = box1(2, 0, 0, 1).to_vec();
        cs.extend(box1(2, 1, 0, 1));
        cs.push(Constraint::le(vec![q(1, 1), q(1, 1)], q(1, 1)));
        let out = lp_maximize(&[q(1, 1), q(1, 1)], &cs).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: q(1, 1), point: vec![q(0, 1), q(1, 1)] });
    }

    #[test]
    fn free_variable_on_optimal_face() {
        // max y with y <= 3, x free: x is pinned, not reported unbounded.
        let cs = [Constraint::le(vec![q(0, 1), q(1, 1)], q(3, 1))];
        match lp_maximize(&[q(0, 1), q(1, 1)], &cs).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, q(3, 1));
                assert_eq!(point[1], q(3, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities() {
        let cs = [
            Constraint::eq(vec![q(1, 1), q(1, 1)], q(2, 1)),
            Constraint::eq(vec![q(2, 1), q(2, 1)], q(4, 1)),
            Constraint::coordinate(2, 0, Relation::Ge, q(0, 1)),
            Constraint::coordinate(2, 1, Relation::Ge, q(0, 1)),
        ];
        let out = lp_maximize(&[q(1, 1), q(0, 1)], &cs).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: q(2, 1), point: vec![q(2, 1), q(0, 1)] });
    }
}
