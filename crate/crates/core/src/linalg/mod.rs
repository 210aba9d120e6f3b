//! Dense linear algebra kernels for the orthogonal group and Stiefel manifold.
//!
//! Skew-symmetric matrices are the Lie algebra of `O_n`; every tangent vector
//! at `Y` is `Y A` with `A` skew. The kernels here are the building blocks for
//! the geometries in [`crate::manifold`]:
//!
//! ```text
//! H_ij          = e_i e_j^T - e_j e_i^T          (i < j)
//! Expm(a H_ij)  = identity with block [[cos a, sin a], [-sin a, cos a]] at (i, j)
//! ```

mod expm;
mod givens;
mod random;
mod skew;

pub use expm::{expm_skew, logm_orthogonal};
pub use givens::{apply_givens_right, expm_givens, GivensCoefficients};
pub use random::{
    gaussian_matrix, gaussian_vector, haar_orthogonal, random_orthogonal, random_skew,
    random_stiefel, seeded_rng, Rng64,
};
pub use skew::SkewMatrix;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Orthonormality residual accepted for user-supplied points.
pub const INPUT_ORTHONORMALITY_TOL: f64 = 1e-10;

/// Residual above which iterates are re-orthonormalized. Internal kernels
/// accept inputs up to this level.
pub const REORTHONORMALIZE_TOL: f64 = 1e-8;

/// `||Y^T Y - I||_F` for an `n x p` matrix.
pub fn orthonormality_residual(y: &DMatrix<f64>) -> f64 {
    let p = y.ncols();
    (y.transpose() * y - DMatrix::<f64>::identity(p, p)).norm()
}

/// Checks `||Y^T Y - I||_F <= tol`.
pub fn check_orthonormal(y: &DMatrix<f64>, tol: f64) -> Result<()> {
    let residual = orthonormality_residual(y);
    if residual.is_finite() && residual <= tol {
        Ok(())
    } else {
        Err(Error::NotOrthonormal {
            residual,
            tolerance: tol,
        })
    }
}

/// Nearest matrix with orthonormal columns (polar factor `U V^T`).
pub fn polar_factor(y: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = y.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Re-orthonormalizes `y` in place when its residual exceeds
/// [`REORTHONORMALIZE_TOL`]. Returns whether a correction was applied.
pub fn reorthonormalize_if_needed(y: &mut DMatrix<f64>) -> bool {
    if orthonormality_residual(y) > REORTHONORMALIZE_TOL {
        *y = polar_factor(y);
        true
    } else {
        false
    }
}

/// Orthonormal basis `U_perp` (`n x (n-p)`) of the complement of `span(U)`.
///
/// Computed from the Householder QR of `[U | 0]`, whose orthogonal factor is
/// square and starts with a basis of `span(U)`.
pub fn orth_complement_basis(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = u.shape();
    if p >= n {
        return Err(Error::DimensionMismatch(format!(
            "complement of an n x p frame needs p < n (got {n} x {p})"
        )));
    }
    check_orthonormal(u, REORTHONORMALIZE_TOL)?;
    let mut padded = DMatrix::<f64>::zeros(n, n);
    padded.columns_mut(0, p).copy_from(u);
    let q = padded.qr().q();
    Ok(q.columns(p, n - p).into_owned())
}
