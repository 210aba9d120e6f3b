//! Gap-ensuring checks for the Givens rule on `O_n`.
//!
//! Transporting `Y H_ij` along `Y Expm(C)` gives the coefficient
//! `Expm(C/2)^T H_ij Expm(C/2)`. With `E = Expm(C/2)` and the normalized
//! basis `A = H_ij / sqrt(2)`,
//!
//! ```text
//! Tr(A^T E^T A E) = E_ii E_jj - E_ij E_ji
//! r               = 2 log(1 + sqrt(1 - beta))
//! gamma           = max_k |B_k| sqrt(1 - beta^2)
//! ```
//!
//! Whenever `||C_k||_F <= r` every alignment is at least `beta`, and the
//! transported block projection is within `|B_k| sqrt(1 - beta^2)` of the
//! Givens one in operator norm.

use nalgebra::DMatrix;

use super::norms::norm_equiv_ratio;
use crate::linalg::{expm_skew, SkewMatrix};
use crate::manifold::{self, Point, Tangent};
use crate::selection::{conjugated_projection, singleton_givens_decomposition, GivensPartition, SubspaceProjection};
use crate::{Error, Result};

/// Slack on the alignment inequality.
pub const ALIGNMENT_TOL: f64 = 1e-10;
/// Slack on the operator-distance inequality.
pub const DISTANCE_TOL: f64 = 1e-8;
/// Relative slack on the radius premise, so a displacement rescaled to
/// exactly `r` is not rejected by rounding.
pub const RADIUS_RTOL: f64 = 1e-12;

/// `2 log(1 + sqrt(1 - beta))`.
pub fn gap_radius(beta: f64) -> f64 {
    2.0 * (1.0 + (1.0 - beta).sqrt()).ln()
}

/// `max_block_size * sqrt(1 - beta^2)`.
pub fn gap_gamma(max_block_size: usize, beta: f64) -> f64 {
    max_block_size as f64 * (1.0 - beta * beta).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockGap {
    pub block: usize,
    pub displacement_norm: f64,
    /// Whether `||C_k||_F <= r`; the premise of the alignment bound.
    pub within_radius: bool,
    /// Minimum over the block's normalized basis of the transported alignment.
    pub min_alignment: f64,
    /// `||P_k - P'_k||_2` between the Givens and transported projections.
    pub operator_distance: f64,
    /// `|B_k| sqrt(1 - beta^2)`.
    pub distance_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub beta: f64,
    pub radius: f64,
    pub gamma: f64,
    /// `sqrt(m) gamma >= 1`: the norm-equivalence bound says nothing.
    pub vacuous: bool,
    pub blocks: Vec<BlockGap>,
    /// Every alignment is at least `beta - 1e-10` and every operator distance
    /// is within its bound (`+1e-8`).
    pub pass: bool,
}

impl GapReport {
    pub fn min_alignment(&self) -> f64 {
        self.blocks.iter().map(|b| b.min_alignment).fold(f64::INFINITY, f64::min)
    }

    /// Whether every displacement satisfied the radius premise.
    pub fn premise_holds(&self) -> bool {
        self.blocks.iter().all(|b| b.within_radius)
    }
}

/// Alignment and operator distance of one block under displacement `C`.
fn block_gap(pairs: &[(usize, usize)], c: &SkewMatrix) -> (f64, f64) {
    let e = expm_skew(&(c * 0.5));
    let mut min_alignment = f64::INFINITY;
    // Coordinates of the transported normalized basis restricted to the
    // block's own frame indices: entry (a, b) is
    // (E^T H_a E / sqrt 2) against H_b / sqrt 2, i.e. E_ia E_jb - E_ja E_ib
    // evaluated at the pair (i', j') of b.
    let d = pairs.len();
    let mut overlap = DMatrix::zeros(d, d);
    for (a, &(i, j)) in pairs.iter().enumerate() {
        min_alignment = min_alignment.min(e[(i, i)] * e[(j, j)] - e[(i, j)] * e[(j, i)]);
        for (b, &(k, l)) in pairs.iter().enumerate() {
            overlap[(a, b)] = e[(i, k)] * e[(j, l)] - e[(j, k)] * e[(i, l)];
        }
    }
    let sigma_min = overlap.singular_values().min().clamp(0.0, 1.0);
    (min_alignment, (1.0 - sigma_min * sigma_min).max(0.0).sqrt())
}

/// Evaluates the gap inequalities for `partition` with one displacement per
/// block. Displacements outside the radius are flagged, not rejected.
pub fn check_gap_orthogonal(partition: &GivensPartition, displacements: &[SkewMatrix], beta: f64) -> Result<GapReport> {
    if displacements.len() != partition.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} displacements for {} blocks",
            displacements.len(),
            partition.len()
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta = {beta} outside [0, 1]")));
    }
    let n = partition.n();
    let radius = gap_radius(beta);
    let gamma = gap_gamma(partition.max_block_size(), beta);
    let mut blocks = Vec::with_capacity(partition.len());
    let mut pass = true;
    for (k, (pairs, c)) in partition.blocks().iter().zip(displacements).enumerate() {
        if c.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "displacement {k} is {}x{}, expected {n}x{n}",
                c.dim(),
                c.dim()
            )));
        }
        let displacement_norm = c.norm();
        let (min_alignment, operator_distance) = block_gap(pairs, c);
        let distance_bound = gap_gamma(pairs.len(), beta);
        pass &= min_alignment >= beta - ALIGNMENT_TOL && operator_distance <= distance_bound + DISTANCE_TOL;
        blocks.push(BlockGap {
            block: k,
            displacement_norm,
            within_radius: displacement_norm <= radius * (1.0 + RADIUS_RTOL),
            min_alignment,
            operator_distance,
            distance_bound,
        });
    }
    Ok(GapReport {
        beta,
        radius,
        gamma,
        vacuous: (partition.len() as f64).sqrt() * gamma >= 1.0,
        blocks,
        pass,
    })
}

/// `C = pi (H_{i i'} + H_{j j'})`, for which
/// `Expm(C/2)^T H_{i'j'} Expm(C/2) = H_ij`: transporting the Givens
/// direction `(i', j')` lands exactly on `(i, j)`.
pub fn adversarial_displacement(n: usize, pair: (usize, usize), target: (usize, usize)) -> Result<SkewMatrix> {
    let (i, j) = pair;
    let (ip, jp) = target;
    let idx = [i, j, ip, jp];
    if idx.iter().any(|&a| a >= n) {
        return Err(Error::InvalidArgument(format!("indices {idx:?} out of range for n = {n}")));
    }
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return Err(Error::InvalidArgument(format!("indices {idx:?} are not distinct")));
            }
        }
    }
    let pi = std::f64::consts::PI;
    Ok(SkewMatrix::from_entries(n, &[(i, ip, pi), (j, jp, pi)]))
}

#[derive(Clone, Debug)]
pub struct AdversarialReport {
    pub displacement: SkewMatrix,
    /// `||Expm(C/2)^T H_{i'j'} Expm(C/2) - H_ij||_F`.
    pub conjugation_residual: f64,
    pub sigma_min: f64,
    pub ratio: f64,
}

/// Singleton Givens decomposition at `y0` in which block `(i', j')` is
/// transported to `y0` along the adversarial displacement (from
/// `y0 Expm(-C)`) while every other block is taken at `y0`. The stacked
/// operator loses `(i', j')` and repeats `(i, j)`.
pub fn adversarial_collapse(y0: &Point, pair: (usize, usize), target: (usize, usize)) -> Result<AdversarialReport> {
    let y = match y0 {
        Point::Orthogonal(y) => y,
        _ => return Err(Error::InvalidArgument("adversarial construction lives on O_n".into())),
    };
    let n = y.nrows();
    let c = adversarial_displacement(n, pair, target)?;
    let e = expm_skew(&(&c * 0.5));
    let h_target = SkewMatrix::basis(n, target.0, target.1).conjugate(&e);
    let h_pair = SkewMatrix::basis(n, pair.0, pair.1);
    let conjugation_residual = (&h_target - &h_pair).norm();

    let source = Point::Orthogonal(y * expm_skew(&(-&c)));
    let dir = Tangent::Orthogonal(c.clone());
    let (lo, hi) = (target.0.min(target.1), target.0.max(target.1));
    let moved = SubspaceProjection::skew_pairs(source.clone(), vec![(lo, hi)])?;
    let transported = conjugated_projection(&source, y0, |v| manifold::transport(&source, &dir, v), &moved)?;

    let mut decomposition: Vec<SubspaceProjection> = singleton_givens_decomposition(y0)?
        .into_iter()
        .filter(|p| p.disjoint_pairs() != Some(&[(lo, hi)][..]))
        .collect();
    decomposition.push(transported);
    let (sigma_min, ratio) = norm_equiv_ratio(&decomposition)?;
    Ok(AdversarialReport {
        displacement: c,
        conjugation_residual,
        sigma_min,
        ratio,
    })
}
