//! Flop estimates charged to the trace.
//!
//! The model counts the dominant arithmetic of each kernel: `4n` per Givens
//! pair update, `2n` per inner product, `2abc` per `a x b` by `b x c`
//! product and `2n^3` per dense `n x n` exponential.

use crate::manifold::Point;

pub fn givens_pair_update(rows: usize) -> u64 {
    4 * rows as u64
}

pub fn dot(len: usize) -> u64 {
    2 * len as u64
}

pub fn matmul(a: usize, b: usize, c: usize) -> u64 {
    2 * (a * b * c) as u64
}

pub fn dense_expm(n: usize) -> u64 {
    2 * (n as u64).pow(3)
}

/// Objective evaluation, charged as one multiply-add per ambient entry.
pub fn value(x: &Point) -> u64 {
    2 * ambient_len(x) as u64
}

/// Riemannian gradient from a Euclidean gradient.
pub fn rgrad(x: &Point) -> u64 {
    match x {
        Point::Euclidean(v) => v.len() as u64,
        Point::Orthogonal(y) => matmul(y.nrows(), y.nrows(), y.nrows()),
        Point::Stiefel(u) => 2 * matmul(u.nrows(), u.ncols(), u.ncols()),
        Point::Product(ps) => ps.iter().map(rgrad).sum(),
    }
}

/// Dense exponential step.
pub fn exp(x: &Point) -> u64 {
    match x {
        Point::Euclidean(v) => v.len() as u64,
        Point::Orthogonal(y) => dense_expm(y.nrows()) + matmul(y.nrows(), y.nrows(), y.nrows()),
        Point::Stiefel(u) => dense_expm(u.nrows()) + matmul(u.nrows(), u.nrows(), u.ncols()),
        Point::Product(ps) => ps.iter().map(exp).sum(),
    }
}

fn ambient_len(x: &Point) -> usize {
    match x {
        Point::Euclidean(v) => v.len(),
        Point::Orthogonal(y) | Point::Stiefel(y) => y.len(),
        Point::Product(ps) => ps.iter().map(ambient_len).sum(),
    }
}
