use nalgebra::DMatrix;

use super::SkewMatrix;
use crate::{Error, Result};

/// Coefficients `a_ij` of a skew matrix `sum a_ij H_ij` supported on disjoint
/// index pairs. Because the `H_ij` commute when their indices are disjoint,
/// the exponential factors into independent plane rotations.
#[derive(Clone, Debug, PartialEq)]
pub struct GivensCoefficients {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl GivensCoefficients {
    /// Validates `i < j < n`, finite angles and pairwise disjoint indices.
    pub fn new(n: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut used = vec![false; n];
        for &(i, j, a) in &entries {
            if i >= j || j >= n {
                return Err(Error::InvalidGivens(format!(
                    "pair ({i}, {j}) must satisfy i < j < {n}"
                )));
            }
            if !a.is_finite() {
                return Err(Error::InvalidGivens(format!("non-finite angle at ({i}, {j})")));
            }
            if used[i] || used[j] {
                return Err(Error::InvalidGivens(format!(
                    "pair ({i}, {j}) shares an index with another pair"
                )));
            }
            used[i] = true;
            used[j] = true;
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_skew(&self) -> SkewMatrix {
        SkewMatrix::from_entries(self.n, &self.entries)
    }
}

/// `Expm(sum a_ij H_ij)` assembled from closed-form plane rotations.
pub fn expm_givens(g: &GivensCoefficients) -> DMatrix<f64> {
    let mut e = DMatrix::identity(g.n, g.n);
    for &(i, j, a) in &g.entries {
        let (s, c) = a.sin_cos();
        e[(i, i)] = c;
        e[(i, j)] = s;
        e[(j, i)] = -s;
        e[(j, j)] = c;
    }
    e
}

/// `Y <- Y Expm(sum a_ij H_ij)` in `O(rows)` work per pair. Only the columns
/// named in `g` are written.
pub fn apply_givens_right(y: &mut DMatrix<f64>, g: &GivensCoefficients) -> Result<()> {
    if y.ncols() != g.n {
        return Err(Error::DimensionMismatch(format!(
            "Givens coefficients for n = {} applied to {} columns",
            g.n,
            y.ncols()
        )));
    }
    for &(i, j, a) in &g.entries {
        let (s, c) = a.sin_cos();
        for r in 0..y.nrows() {
            let yi = y[(r, i)];
            let yj = y[(r, j)];
            y[(r, i)] = c * yi - s * yj;
            y[(r, j)] = s * yi + c * yj;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_skew, random_orthogonal};

    #[test]
    fn rejects_invalid_pairs() {
        assert!(GivensCoefficients::new(4, vec![(1, 0, 0.1)]).is_err());
        assert!(GivensCoefficients::new(4, vec![(0, 4, 0.1)]).is_err());
        assert!(GivensCoefficients::new(4, vec![(0, 1, 0.1), (1, 2, 0.3)]).is_err());
        assert!(GivensCoefficients::new(4, vec![(0, 1, f64::NAN)]).is_err());
        assert!(GivensCoefficients::new(4, vec![(0, 1, 0.1), (2, 3, 0.3)]).is_ok());
    }

    #[test]
    fn quarter_turn_has_expected_pattern() {
        let g = GivensCoefficients::new(2, vec![(0, 1, std::f64::consts::FRAC_PI_2)]).unwrap();
        let e = expm_givens(&g);
        assert!(e[(0, 0)].abs() < 1e-15 && e[(1, 1)].abs() < 1e-15);
        assert!((e[(0, 1)] - 1.0).abs() < 1e-15 && (e[(1, 0)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_matches_dense_exponential() {
        let g = GivensCoefficients::new(6, vec![(0, 3, 0.7), (1, 5, -2.1), (2, 4, 3.0)]).unwrap();
        let dense = expm_skew(&g.to_skew());
        assert!((expm_givens(&g) - dense).norm() < 1e-13);
    }

    #[test]
    fn right_update_touches_only_named_columns() {
        let y0 = random_orthogonal(5, 1);
        let g = GivensCoefficients::new(5, vec![(1, 3, 0.4)]).unwrap();
        let mut y = y0.clone();
        apply_givens_right(&mut y, &g).unwrap();
        for c in [0, 2, 4] {
            assert_eq!(y.column(c), y0.column(c));
        }
        assert!((y - &y0 * expm_givens(&g)).norm() < 1e-15);
    }
}
