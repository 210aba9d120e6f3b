use nalgebra::DMatrix;

use crate::manifold::Tangent;
use crate::selection::SubspaceProjection;
use crate::{manifold, Error, Result};

/// Singular values below this are treated as zero.
pub const SPAN_TOL: f64 = 1e-12;

/// `||v||_P = sqrt(sum_k ||P_k v||^2)`.
pub fn seminorm(v: &Tangent, projections: &[SubspaceProjection]) -> Result<f64> {
    let mut total = 0.0;
    for p in projections {
        let pv = p.apply(v)?;
        total += manifold::metric(p.base(), &pv, &pv)?;
    }
    Ok(total.sqrt())
}

/// Smallest singular value of the stacked operator `[P_1; ...; P_m]` and
/// the norm-equivalence ratio `sup ||v|| / ||v||_P = 1 / sigma_min`
/// (`+inf` when the ranges fail to span).
pub fn norm_equiv_ratio(projections: &[SubspaceProjection]) -> Result<(f64, f64)> {
    let weights = vec![1.0; projections.len()];
    weighted_norm_equiv_ratio(projections, &weights)
}

/// As [`norm_equiv_ratio`] with the `k`-th block scaled by `sqrt(w_k)`. With
/// `w` the sampling probabilities this is
/// `sup ||v|| / sqrt(E ||P v||^2)`.
pub fn weighted_norm_equiv_ratio(projections: &[SubspaceProjection], weights: &[f64]) -> Result<(f64, f64)> {
    let first = projections
        .first()
        .ok_or_else(|| Error::InvalidArgument("no projections".into()))?;
    if weights.len() != projections.len() {
        return Err(Error::InvalidArgument("one weight per projection required".into()));
    }
    let base = first.base();
    let d = base.dimension();
    let mut stacked = DMatrix::zeros(d * projections.len(), d);
    for (k, (p, w)) in projections.iter().zip(weights).enumerate() {
        if p.base() != base {
            return Err(Error::BaseMismatch("projections based at different points".into()));
        }
        stacked
            .view_mut((k * d, 0), (d, d))
            .copy_from(&(p.matrix()? * w.sqrt()));
    }
    let sigma_min = stacked.singular_values().min();
    let ratio = if sigma_min < SPAN_TOL { f64::INFINITY } else { 1.0 / sigma_min };
    Ok((sigma_min, ratio))
}

/// Norm-equivalence ratio recorded at one outer iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEquivalenceRow {
    pub iteration: usize,
    pub sigma_min: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormEquivalenceReport {
    pub rows: Vec<NormEquivalenceRow>,
}

impl NormEquivalenceReport {
    pub fn ratio_at(&self, iteration: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.iteration == iteration).map(|r| r.ratio)
    }

    /// Whether every recorded decomposition spans the tangent space.
    pub fn all_spanning(&self) -> bool {
        self.rows.iter().all(|r| r.sigma_min >= SPAN_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;
    use crate::manifold::Point;
    use crate::selection::singleton_givens_decomposition;
    use nalgebra::DVector;

    #[test]
    fn orthogonal_decomposition_has_ratio_one() {
        let x = Point::Orthogonal(random_orthogonal(5, 1));
        let decomp = singleton_givens_decomposition(&x).unwrap();
        let (sigma, ratio) = norm_equiv_ratio(&decomp).unwrap();
        assert!((sigma - 1.0).abs() < 1e-12);
        assert!((ratio - 1.0).abs() < 1e-12);
        let v = Tangent::Orthogonal(crate::linalg::SkewMatrix::from_entries(5, &[(0, 4, 2.0)]));
        assert!((seminorm(&v, &decomp).unwrap() - manifold::norm(&x, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn missing_direction_gives_infinite_ratio() {
        let x = Point::Euclidean(DVector::zeros(2));
        let e1 = Tangent::Euclidean(DVector::from_vec(vec![1.0, 0.0]));
        let p = SubspaceProjection::onto_span(x, &[e1]).unwrap();
        let (sigma, ratio) = norm_equiv_ratio(&[p.clone(), p]).unwrap();
        assert!(sigma < SPAN_TOL);
        assert!(ratio.is_infinite());
    }

    #[test]
    fn skewed_pair_ratio_matches_closed_form() {
        // Lines at angle theta: stacked singular values sqrt(1 +- cos theta).
        let theta: f64 = 0.3;
        let x = Point::Euclidean(DVector::zeros(2));
        let a = Tangent::Euclidean(DVector::from_vec(vec![1.0, 0.0]));
        let b = Tangent::Euclidean(DVector::from_vec(vec![theta.cos(), theta.sin()]));
        let pa = SubspaceProjection::onto_span(x.clone(), &[a]).unwrap();
        let pb = SubspaceProjection::onto_span(x, &[b]).unwrap();
        let (sigma, _) = norm_equiv_ratio(&[pa, pb]).unwrap();
        assert!((sigma - (1.0 - theta.cos()).sqrt()).abs() < 1e-12);
    }
}
