use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::SkewMatrix;

/// Seedable generator used throughout the crate; streams are portable
/// across platforms.
pub type Rng64 = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard normal entries, filled column by column.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(n: usize, rng: &mut Rng64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Skew part of a Gaussian matrix.
pub fn random_skew(n: usize, rng: &mut Rng64) -> SkewMatrix {
    SkewMatrix::skew_part(&gaussian_matrix(n, n, rng))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `diag(R)` folded into `Q`.
pub fn haar_orthogonal(n: usize, rng: &mut Rng64) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-distributed element of `O_n` from a seed.
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    haar_orthogonal(n, &mut seeded_rng(seed))
}

/// Uniformly distributed point of `St(p, n)`: first `p` columns of a Haar
/// orthogonal matrix.
pub fn random_stiefel(n: usize, p: usize, rng: &mut Rng64) -> DMatrix<f64> {
    haar_orthogonal(n, rng).columns(0, p).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormality_residual;

    #[test]
    fn haar_sample_is_orthogonal_and_reproducible() {
        let a = random_orthogonal(50, 42);
        assert!(orthonormality_residual(&a) <= 1e-12);
        assert_eq!(a, random_orthogonal(50, 42));
        assert_ne!(a, random_orthogonal(50, 43));
    }

    #[test]
    fn one_by_one_is_plus_or_minus_one() {
        for seed in 0..10 {
            let q = random_orthogonal(1, seed);
            assert_eq!(q[(0, 0)].abs(), 1.0);
        }
    }
}
