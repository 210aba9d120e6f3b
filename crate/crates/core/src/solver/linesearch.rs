use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2};

/// Exact minimizer of `eta -> Tr(G Expm(-eta H_ij))` over a full turn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairLineSearch {
    /// Minimizing `eta` in `[0, 2 pi)`.
    pub eta: f64,
    /// Minimum value `sum_{a != i, j} g_aa - r`.
    pub value: f64,
    /// The `(i, j)` block of `Expm(-eta* H_ij)`.
    pub block: Matrix2<f64>,
    /// `r = sqrt((g_ii + g_jj)^2 + (g_ij - g_ji)^2)`.
    pub amplitude: f64,
}

impl PairLineSearch {
    /// Rotation angle `a = -eta*` in `(-pi, pi]`, so that the step is
    /// `Y <- Y Expm(a H_ij)`.
    pub fn angle(&self) -> f64 {
        let a = -self.eta;
        if a <= -PI {
            a + TAU
        } else {
            a
        }
    }
}

/// Exact Givens line search for `f(Y) = Tr(D^T Y)` along `Y Expm(-eta H_ij)`,
/// where `G = D^T Y`.
///
/// With `E = Expm(a H_ij)` (`E_ii = E_jj = cos a`, `E_ij = -E_ji = sin a`),
///
/// ```text
/// Tr(G E) = sum_{a != i,j} g_aa + (g_ii + g_jj) cos a - (g_ij - g_ji) sin a
/// ```
///
/// whose minimum over `a` is `sum - r`, attained at
/// `E_ii = E_jj = -(g_ii + g_jj)/r`, `E_ij = -E_ji = (g_ij - g_ji)/r`.
/// When `r = 0` the pair is stationary and `eta* = 0`.
pub fn givens_exact_linesearch(g: &DMatrix<f64>, i: usize, j: usize) -> PairLineSearch {
    assert!(g.is_square() && i < g.nrows() && j < g.nrows() && i != j, "invalid pair ({i}, {j})");
    let rest: f64 = (0..g.nrows()).filter(|&a| a != i && a != j).map(|a| g[(a, a)]).sum();
    pair_linesearch(rest, g[(i, i)], g[(j, j)], g[(i, j)], g[(j, i)])
}

/// [`givens_exact_linesearch`] from the four relevant entries of `G` and the
/// trace of the remaining diagonal.
pub fn pair_linesearch(rest: f64, g_ii: f64, g_jj: f64, g_ij: f64, g_ji: f64) -> PairLineSearch {
    let sum = g_ii + g_jj;
    let diff = g_ij - g_ji;
    let r = sum.hypot(diff);
    if r == 0.0 {
        return PairLineSearch {
            eta: 0.0,
            value: rest,
            block: Matrix2::identity(),
            amplitude: 0.0,
        };
    }
    let (c, s) = (-sum / r, diff / r);
    // Expm(a H) with cos a = c, sin a = s; eta = -a.
    let mut eta = -s.atan2(c);
    if eta < 0.0 {
        eta += TAU;
    }
    if eta >= TAU {
        eta -= TAU;
    }
    PairLineSearch {
        eta,
        value: rest - r,
        block: Matrix2::new(c, s, -s, c),
        amplitude: r,
    }
}
