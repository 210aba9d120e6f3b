use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_orthonormal, SkewMatrix, REORTHONORMALIZE_TOL};
use crate::{Error, Result};

/// Angular distance from `pi` below which the logarithm is rejected.
const BRANCH_TOL: f64 = 1e-6;

/// Matrix exponential of a skew matrix; the result lies in `SO(n)`.
///
/// Uses nalgebra's scaling-and-squaring Pade approximant.
pub fn expm_skew(c: &SkewMatrix) -> DMatrix<f64> {
    c.matrix().exp()
}

/// Principal logarithm of an orthogonal matrix.
///
/// With `S = (Q + Q^T)/2` and `K = (Q - Q^T)/2`, each invariant plane of `Q`
/// is a rotation by `theta` where `S` acts as `cos(theta)` and `K` as
/// `sin(theta) J`. Since `S` and `K` commute,
///
/// ```text
/// log Q = K g(S),     g(cos t) = t / sin t
/// ```
///
/// and `g` is evaluated on the symmetric eigendecomposition of `S`. Fails
/// with [`Error::LogBranch`] when an eigenvalue of `Q` is within tolerance of
/// `-1` (rotation angle near `pi`, or a reflection).
pub fn logm_orthogonal(q: &DMatrix<f64>) -> Result<SkewMatrix> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "logarithm of a non-square {:?} matrix",
            q.shape()
        )));
    }
    check_orthonormal(q, REORTHONORMALIZE_TOL)?;
    let q_t = q.transpose();
    let s = (q + &q_t) * 0.5;
    let k = (q - &q_t) * 0.5;
    let eig = SymmetricEigen::new(s);
    let limit = -(BRANCH_TOL.cos());
    let mut g = eig.eigenvalues.clone();
    for lambda in g.iter_mut() {
        let l = lambda.clamp(-1.0, 1.0);
        if l < limit {
            return Err(Error::LogBranch);
        }
        *lambda = theta_over_sin(l);
    }
    let v = &eig.eigenvectors;
    let g_s = v * DMatrix::from_diagonal(&g) * v.transpose();
    Ok(SkewMatrix::skew_part(&(k * g_s)))
}

/// `t / sin t` for `t = acos(c)`, stable as `c -> 1`.
fn theta_over_sin(c: f64) -> f64 {
    let x = 1.0 - c;
    let t = 2.0 * (0.5 * x).sqrt().asin();
    if t < 1e-4 {
        let t2 = t * t;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        t / t.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_skew, seeded_rng};

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(expm_skew(&SkewMatrix::zeros(4)), DMatrix::identity(4, 4));
    }

    #[test]
    fn log_inverts_exp_inside_branch() {
        let mut rng = seeded_rng(17);
        for n in 2..8 {
            let c = random_skew(n, &mut rng);
            let c = &c * (2.5 / c.norm().max(1.0));
            let back = logm_orthogonal(&expm_skew(&c)).unwrap();
            assert!((back.matrix() - c.matrix()).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn log_of_small_rotation_is_accurate() {
        let c = SkewMatrix::from_entries(3, &[(0, 2, 1e-9)]);
        let back = logm_orthogonal(&expm_skew(&c)).unwrap();
        assert!((back.matrix() - c.matrix()).norm() < 1e-20);
    }

    #[test]
    fn log_rejects_half_turn_and_reflection() {
        let half = SkewMatrix::from_entries(2, &[(0, 1, std::f64::consts::PI)]);
        assert_eq!(logm_orthogonal(&expm_skew(&half)), Err(Error::LogBranch));
        let reflection = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0]));
        assert_eq!(logm_orthogonal(&reflection), Err(Error::LogBranch));
    }

    #[test]
    fn theta_over_sin_is_continuous_at_switch() {
        let t: f64 = 1e-4;
        let below = theta_over_sin((t * (1.0 - 1e-9)).cos());
        let above = t / t.sin();
        assert!((below - above).abs() < 1e-12);
    }
}
