//! Dense primal simplex for small linear programs in the form
//! `maximize c.x subject to A x <= b, x >= 0` with `b >= 0`, so the slack
//! basis is feasible and no phase-one is needed. Bland's rule guards
//! against cycling. Generic over the scalar so the same tableau runs in
//! f64 or in exact rational arithmetic.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar: Clone + PartialOrd + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn is_zero_eps(&self) -> bool;
    /// Strictly negative beyond rounding noise.
    fn is_negative_eps(&self) -> bool;
    /// Strictly positive beyond rounding noise.
    fn is_positive_eps(&self) -> bool {
        !self.is_zero_eps() && !self.is_negative_eps()
    }
}

const F64_EPS: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero_eps(&self) -> bool {
        self.abs() <= F64_EPS
    }
    fn is_negative_eps(&self) -> bool {
        *self < -F64_EPS
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite coefficient")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn is_zero_eps(&self) -> bool {
        self.is_zero()
    }
    fn is_negative_eps(&self) -> bool {
        self.is_negative()
    }
}

pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
}

/// Maximize `c.x` over `A x <= b`, `x >= 0`, `b >= 0`.
pub fn maximize<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpSolution<T>> {
    let m = a.len();
    let n = c.len();
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Solver(format!("row {i} has wrong arity")));
        }
    }
    if b.len() != m {
        return Err(Error::Solver("rhs arity mismatch".into()));
    }
    if b.iter().any(|v| v.is_negative_eps()) {
        return Err(Error::Solver("rhs must be nonnegative".into()));
    }

    // Tableau: m rows of [A | I | b], objective row of reduced costs.
    let width = n + m + 1;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = Vec::with_capacity(width);
        row.extend(a[i].iter().cloned());
        for j in 0..m {
            row.push(if i == j { T::one() } else { T::zero() });
        }
        row.push(b[i].clone());
        t.push(row);
    }
    let mut obj: Vec<T> = Vec::with_capacity(width);
    for cj in c {
        obj.push(T::zero().sub(cj));
    }
    obj.extend(std::iter::repeat_n(T::zero(), m + 1));

    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_pivots = 50 * (m + n).max(64);
    for _ in 0..max_pivots {
        // Bland: first column with a negative reduced cost.
        let entering = match (0..n + m).find(|&j| obj[j].is_negative_eps()) {
            Some(j) => j,
            None => {
                // Optimal: read off the basic solution.
                let mut x = vec![T::zero(); n];
                for (i, &bv) in basis.iter().enumerate() {
                    if bv < n {
                        x[bv] = t[i][width - 1].clone();
                    }
                }
                let objective = obj[width - 1].clone();
                return Ok(LpSolution { x, objective });
            }
        };
        // Ratio test; Bland ties break on the smallest basis variable.
        let mut leaving: Option<(usize, T)> = None;
        for i in 0..m {
            if !t[i][entering].is_positive_eps() {
                continue;
            }
            let ratio = t[i][width - 1].div(&t[i][entering]);
            let replace = match &leaving {
                None => true,
                Some((row, best)) => {
                    ratio < *best || (ratio == *best && basis[i] < basis[*row])
                }
            };
            if replace {
                leaving = Some((i, ratio));
            }
        }
        let (pivot_row, _) = leaving.ok_or_else(|| {
            Error::Solver("objective is unbounded above".into())
        })?;

        // Pivot. Rows of network programs stay sparse, so touch only the
        // pivot row's nonzero columns.
        let pivot = t[pivot_row][entering].clone();
        for v in t[pivot_row].iter_mut() {
            if !v.is_zero_eps() {
                *v = v.div(&pivot);
            }
        }
        let nonzero_cols: Vec<usize> = (0..width)
            .filter(|&j| j != entering && !t[pivot_row][j].is_zero_eps())
            .collect();
        for i in 0..m {
            if i == pivot_row || t[i][entering].is_zero_eps() {
                continue;
            }
            let factor = t[i][entering].clone();
            for &j in &nonzero_cols {
                let delta = factor.mul(&t[pivot_row][j]);
                t[i][j] = t[i][j].sub(&delta);
            }
            t[i][entering] = T::zero();
        }
        if !obj[entering].is_zero_eps() {
            let factor = obj[entering].clone();
            for &j in &nonzero_cols {
                let delta = factor.mul(&t[pivot_row][j]);
                obj[j] = obj[j].sub(&delta);
            }
            obj[entering] = T::zero();
        }
        basis[pivot_row] = entering;
    }
    Err(Error::Solver("pivot budget exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_textbook_lp() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18.
        let a = vec![
            vec![1.0, 0.0],
            vec![0.0, 2.0],
            vec![3.0, 2.0],
        ];
        let b = vec![4.0, 12.0, 18.0];
        let c = vec![3.0, 5.0];
        let sol = maximize(&a, &b, &c).unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn exact_arithmetic_gives_exact_vertices() {
        let r = |x: f64| BigRational::from_f64(x);
        let a = vec![
            vec![r(1.0), r(0.0)],
            vec![r(0.0), r(2.0)],
            vec![r(3.0), r(2.0)],
        ];
        let b = vec![r(4.0), r(12.0), r(18.0)];
        let c = vec![r(3.0), r(5.0)];
        let sol = maximize(&a, &b, &c).unwrap();
        assert_eq!(sol.objective, r(36.0));
    }

    #[test]
    fn degenerate_lp_terminates() {
        // Degenerate vertex at the origin side; Bland avoids cycling.
        let a = vec![
            vec![1.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ];
        let b = vec![1.0, 1.0, 0.0];
        let c = vec![1.0, 1.0, 1.0];
        let sol = maximize(&a, &b, &c).unwrap();
        assert!(sol.objective <= 1.5 + 1e-9);
    }

    #[test]
    fn unbounded_is_reported() {
        let a = vec![vec![-1.0]];
        let b = vec![0.0];
        let c = vec![1.0];
        assert!(matches!(maximize(&a, &b, &c), Err(Error::Solver(_))));
    }
}
