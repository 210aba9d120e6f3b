//! The orthogonal group `O_n` with the bi-invariant metric.
//!
//! A tangent vector at `Y` is stored by its skew coefficient `A` (the vector
//! itself is `Y A`).
//!
//! ```text
//! <Y A, Y B>_Y          = Tr(A^T B)
//! Exp_Y(Y C)            = Y Expm(C)
//! Log_Y(Z)              = logm(Y^T Z)
//! grad f(Y)             = Y skew(Y^T G),            G = Euclidean gradient
//! Gamma along Y Expm(tC), t = 0 -> 1:
//!     Y A  ->  Y Expm(C) * Expm(C/2)^T A Expm(C/2)
//! ```
//!
//! The transport formula follows from `Y Expm(tC) Expm(tC/2)^T A Expm(tC/2)`
//! being a parallel field along the geodesic.

use nalgebra::DMatrix;

use crate::linalg::{expm_skew, logm_orthogonal, reorthonormalize_if_needed, SkewMatrix};
use crate::{Error, Result};

pub fn metric(a: &SkewMatrix, b: &SkewMatrix) -> f64 {
    a.inner(b)
}

pub fn exp(y: &DMatrix<f64>, c: &SkewMatrix) -> DMatrix<f64> {
    let mut z = y * expm_skew(c);
    reorthonormalize_if_needed(&mut z);
    z
}

/// Skew coefficient `C` with `Exp_Y(Y C) = Z`. Points whose relative rotation
/// has an angle near `pi`, or lie in the other connected component, are
/// reported as [`Error::CutLocus`].
pub fn inv_exp(y: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<SkewMatrix> {
    logm_orthogonal(&(y.transpose() * z)).map_err(|e| match e {
        Error::LogBranch => Error::CutLocus,
        other => other,
    })
}

/// Coefficient of the transported vector relative to the new base point
/// `Y Expm(C)`.
pub fn transport(c: &SkewMatrix, a: &SkewMatrix) -> SkewMatrix {
    a.conjugate(&expm_skew(&(c * 0.5)))
}

/// Skew coefficient of the Riemannian gradient.
pub fn gradient(y: &DMatrix<f64>, egrad: &DMatrix<f64>) -> SkewMatrix {
    SkewMatrix::skew_part(&(y.transpose() * egrad))
}

/// Coordinates in the orthonormal frame `{H_ij / sqrt(2)}`, pairs in
/// lexicographic order.
pub fn coordinates(a: &SkewMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(std::f64::consts::SQRT_2 * a.get(i, j));
        }
    }
    out
}

pub fn from_coordinates(n: usize, coords: &[f64]) -> SkewMatrix {
    let mut entries = Vec::with_capacity(coords.len());
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            entries.push((i, j, coords[k] / std::f64::consts::SQRT_2));
            k += 1;
        }
    }
    SkewMatrix::from_entries(n, &entries)
}
