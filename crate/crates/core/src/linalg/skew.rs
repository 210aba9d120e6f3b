use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Square matrix with `A^T = -A` holding exactly.
///
/// Every constructor stores `(M - M^T) / 2`, so the entries below the diagonal
/// are exact negatives of the ones above and the diagonal is exactly zero.
/// The arithmetic operators preserve this.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

impl SkewMatrix {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// Skew part `(M - M^T) / 2` of a square matrix.
    ///
    /// # Panics
    /// If `m` is not square.
    pub fn skew_part(m: &DMatrix<f64>) -> Self {
        assert!(m.is_square(), "skew part of a non-square matrix");
        let n = m.nrows();
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (m[(i, j)] - m[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        Self(a)
    }

    /// Accepts `m` if `||M + M^T||_F <= tol * max(1, ||M||_F)` and stores its
    /// exact skew part.
    pub fn from_matrix(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "skew matrix must be square, got {:?}",
                m.shape()
            )));
        }
        let residual = (m + m.transpose()).norm();
        if !residual.is_finite() || residual > tol * m.norm().max(1.0) {
            return Err(Error::NotSkew(residual));
        }
        Ok(Self::skew_part(m))
    }

    /// Basis element `H_ij = e_i e_j^T - e_j e_i^T` (unnormalized,
    /// `||H_ij||_F = sqrt(2)`). Requires `i != j`.
    pub fn basis(n: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i < n && j < n, "invalid basis index ({i}, {j})");
        let mut a = DMatrix::zeros(n, n);
        a[(i, j)] = 1.0;
        a[(j, i)] = -1.0;
        Self(a)
    }

    /// Skew matrix with the given upper-triangle entries `(i, j, a_ij)`.
    pub fn from_entries(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j, v) in entries {
            assert!(i != j && i < n && j < n, "invalid entry index ({i}, {j})");
            a[(i, j)] += v;
            a[(j, i)] -= v;
        }
        Self(a)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Frobenius inner product `Tr(A^T B)`.
    pub fn inner(&self, other: &SkewMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Keeps the `(i, j)` / `(j, i)` entries listed in `pairs`, zeroing the rest.
    pub fn masked(&self, pairs: &[(usize, usize)]) -> Self {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for &(i, j) in pairs {
            out[(i, j)] = self.0[(i, j)];
            out[(j, i)] = self.0[(j, i)];
        }
        Self(out)
    }

    /// `E^T A E` for orthogonal `E`, re-symmetrized to exact skewness.
    pub fn conjugate(&self, e: &DMatrix<f64>) -> Self {
        Self::skew_part(&(e.transpose() * &self.0 * e))
    }
}

impl Add for &SkewMatrix {
    type Output = SkewMatrix;
    fn add(self, rhs: &SkewMatrix) -> SkewMatrix {
        SkewMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SkewMatrix {
    type Output = SkewMatrix;
    fn sub(self, rhs: &SkewMatrix) -> SkewMatrix {
        SkewMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &SkewMatrix {
    type Output = SkewMatrix;
    fn neg(self) -> SkewMatrix {
        SkewMatrix(-&self.0)
    }
}

impl Mul<f64> for &SkewMatrix {
    type Output = SkewMatrix;
    fn mul(self, rhs: f64) -> SkewMatrix {
        SkewMatrix(&self.0 * rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_exact_skew(a: &SkewMatrix) -> bool {
        let m = a.matrix();
        (0..a.dim()).all(|i| (0..a.dim()).all(|j| m[(i, j)] == -m[(j, i)]))
    }

    #[test]
    fn skew_part_is_exact() {
        let m = DMatrix::from_fn(5, 5, |i, j| (i as f64 + 0.1).sin() * (j as f64 * 1.7).cos());
        let a = SkewMatrix::skew_part(&m);
        assert!(is_exact_skew(&a));
        let b = &(&a * 0.3) + &a;
        assert!(is_exact_skew(&b));
        assert!(is_exact_skew(&(&b - &a)));
        assert!(is_exact_skew(&-&b));
    }

    #[test]
    fn from_matrix_checks_skewness() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 1)] = 1.0;
        assert!(matches!(
            SkewMatrix::from_matrix(&m, 1e-12),
            Err(Error::NotSkew(_))
        ));
        m[(1, 0)] = -1.0;
        assert_eq!(SkewMatrix::from_matrix(&m, 1e-12).unwrap(), SkewMatrix::basis(3, 0, 1));
    }

    #[test]
    fn basis_has_norm_sqrt_two() {
        let h = SkewMatrix::basis(4, 1, 3);
        assert!((h.norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(h.inner(&SkewMatrix::basis(4, 1, 3)), 2.0);
        assert_eq!(h.inner(&SkewMatrix::basis(4, 0, 3)), 0.0);
    }

    #[test]
    fn mask_keeps_listed_pairs() {
        let a = SkewMatrix::from_entries(4, &[(0, 1, 1.0), (2, 3, 2.0), (0, 2, 3.0)]);
        let m = a.masked(&[(0, 1), (2, 3)]);
        assert_eq!(m, SkewMatrix::from_entries(4, &[(0, 1, 1.0), (2, 3, 2.0)]));
    }
}
