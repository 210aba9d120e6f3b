//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;

/// Scaling-and-squaring Taylor series, independent of the library kernel.
pub fn taylor_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut squarings = 0;
    let mut scaled = a.clone();
    while scaled.norm() > 0.5 {
        scaled *= 0.5;
        squarings += 1;
    }
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..60 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.norm() <= 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
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

/// Skew part of a matrix filled from `entries` in column-major order.
pub fn skew_from(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_iterator(n, n, entries.iter().copied());
    (&m - m.transpose()) * 0.5
}

/// Central difference `(f(t) - f(-t)) / 2t`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, t: f64) -> f64 {
    (f(t) - f(-t)) / (2.0 * t)
}

pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().min()
}
