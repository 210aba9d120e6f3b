//! The Stiefel manifold `St(p, n) = {U in R^{n x p} : U^T U = I}`, `p < n`,
//! with the canonical metric.
//!
//! Write a tangent vector as `V = U A + U_perp B` with `A` skew (`p x p`) and
//! `B` arbitrary (`(n-p) x p`).
//!
//! ```text
//! <V, W>_U   = Tr(V^T (I - U U^T / 2) W) = Tr(A^T A')/2 + Tr(B^T B')
//! grad f(U)  = G - U G^T U
//! Exp_U(V)   = [U U_perp] Expm([[A, -B^T], [B, 0]]) [I_p; 0]
//! ```
//!
//! Orthonormal frame: `U H_ij` (`i < j`, norm 1) followed by
//! `U_perp e_r e_l^T` (column-major in `(r, l)`).

use nalgebra::DMatrix;

use crate::linalg::{
    expm_skew, orth_complement_basis, reorthonormalize_if_needed, SkewMatrix,
};
use crate::Result;

pub fn metric(u: &DMatrix<f64>, v: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    let utv = u.transpose() * v;
    let utw = u.transpose() * w;
    v.dot(w) - 0.5 * utv.dot(&utw)
}

pub fn exp(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = u.shape();
    let q = orth_complement_basis(u)?;
    let a = SkewMatrix::skew_part(&(u.transpose() * v));
    let b = q.transpose() * v;
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (p, p)).copy_from(a.matrix());
    m.view_mut((p, 0), (n - p, p)).copy_from(&b);
    m.view_mut((0, p), (p, n - p)).copy_from(&(-b.transpose()));
    let e = expm_skew(&SkewMatrix::skew_part(&m));
    let mut frame = DMatrix::zeros(n, n);
    frame.columns_mut(0, p).copy_from(u);
    frame.columns_mut(p, n - p).copy_from(&q);
    let mut out = frame * e.columns(0, p);
    reorthonormalize_if_needed(&mut out);
    Ok(out)
}

pub fn gradient(u: &DMatrix<f64>, egrad: &DMatrix<f64>) -> DMatrix<f64> {
    egrad - u * egrad.transpose() * u
}

/// A tangent vector at `U` obtained from an ambient matrix `Z` by removing
/// the symmetric part of `U^T Z`.
pub fn project(u: &DMatrix<f64>, z: &DMatrix<f64>) -> DMatrix<f64> {
    let utz = u.transpose() * z;
    let sym = (&utz + utz.transpose()) * 0.5;
    z - u * sym
}

pub fn coordinates(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (n, p) = u.shape();
    let q = orth_complement_basis(u)?;
    let a = SkewMatrix::skew_part(&(u.transpose() * v));
    let b = q.transpose() * v;
    let mut out = Vec::with_capacity(p * (p - 1) / 2 + (n - p) * p);
    for i in 0..p {
        for j in i + 1..p {
            out.push(a.get(i, j));
        }
    }
    out.extend(b.iter().copied());
    Ok(out)
}

pub fn from_coordinates(u: &DMatrix<f64>, coords: &[f64]) -> Result<DMatrix<f64>> {
    let (n, p) = u.shape();
    let q = orth_complement_basis(u)?;
    let n_pairs = p * (p - 1) / 2;
    let mut entries = Vec::with_capacity(n_pairs);
    let mut k = 0;
    for i in 0..p {
        for j in i + 1..p {
            entries.push((i, j, coords[k]));
            k += 1;
        }
    }
    let a = SkewMatrix::from_entries(p, &entries);
    let b = DMatrix::from_column_slice(n - p, p, &coords[n_pairs..]);
    Ok(u * a.matrix() + q * b)
}

pub fn dimension(n: usize, p: usize) -> usize {
    p * (p - 1) / 2 + (n - p) * p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, orthonormality_residual, random_stiefel, seeded_rng};

    #[test]
    fn exp_stays_on_manifold() {
        let mut rng = seeded_rng(2);
        let u = random_stiefel(7, 3, &mut rng);
        let v = project(&u, &gaussian_matrix(7, 3, &mut rng));
        let w = exp(&u, &v).unwrap();
        assert!(orthonormality_residual(&w) < 1e-12);
    }

    #[test]
    fn exp_of_zero_is_identity_map() {
        let mut rng = seeded_rng(3);
        let u = random_stiefel(5, 2, &mut rng);
        let w = exp(&u, &DMatrix::zeros(5, 2)).unwrap();
        assert!((w - &u).norm() < 1e-14);
    }

    #[test]
    fn coordinates_are_isometric() {
        let mut rng = seeded_rng(4);
        let u = random_stiefel(6, 3, &mut rng);
        let v = project(&u, &gaussian_matrix(6, 3, &mut rng));
        let w = project(&u, &gaussian_matrix(6, 3, &mut rng));
        let cv = coordinates(&u, &v).unwrap();
        let cw = coordinates(&u, &w).unwrap();
        assert_eq!(cv.len(), dimension(6, 3));
        let dot: f64 = cv.iter().zip(&cw).map(|(a, b)| a * b).sum();
        assert!((dot - metric(&u, &v, &w)).abs() < 1e-12);
        assert!((from_coordinates(&u, &cv).unwrap() - v).norm() < 1e-12);
    }
}
