//! Oracles written independently of the library kernels.

use nalgebra::DMatrix;

/// `exp(C)` by truncated Taylor series on `C / 2^s` (with
/// `||C / 2^s||_F <= 1/2`) followed by `s` squarings. The series stops once
/// a term drops below `1e-20` relative to the partial sum.
pub fn taylor_expm(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.nrows();
    let norm = c.norm();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let a = c / 2f64.powi(s);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..60 {
        term = &term * &a / k as f64;
        sum += &term;
        if term.norm() < 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `H_ij = e_i e_j^T - e_j e_i^T`.
pub fn h(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// `Tr(A^T B)`.
pub fn tr_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a.transpose() * b).trace()
}

/// `exp(theta H_ij)` written out entrywise.
pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(n, n);
    r[(i, i)] = theta.cos();
    r[(j, j)] = theta.cos();
    r[(i, j)] = theta.sin();
    r[(j, i)] = -theta.sin();
    r
}

pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    m.singular_values().min()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
