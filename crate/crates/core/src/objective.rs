//! Objective functions.
//!
//! An objective supplies its value and Euclidean gradient; the Riemannian
//! gradient is derived in [`crate::manifold::riemannian_gradient`]. Optional
//! smoothness constants feed the fixed `1/L` step-size policy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::manifold::{Ambient, Point};
use crate::{Error, Result};

pub trait Objective {
    fn value(&self, x: &Point) -> Result<f64>;

    fn euclidean_gradient(&self, x: &Point) -> Result<Ambient>;

    /// Global smoothness constant `L_f`, if known.
    fn smoothness(&self) -> Option<f64> {
        None
    }

    /// Per-block constants `L_k`, indexed like the selection rule's blocks.
    fn block_constants(&self) -> Option<&[f64]> {
        None
    }

    /// `D` when the objective is `f(Y) = Tr(D^T Y)`. Enables the exact
    /// Givens line search.
    fn linear_trace(&self) -> Option<&DMatrix<f64>> {
        None
    }
}

/// `f(Y) = Tr(D^T Y)` on `O_n` or `St(p, n)`, with `L_f = ||D||_F`.
#[derive(Clone, Debug)]
pub struct LinearTrace {
    d: DMatrix<f64>,
    smoothness: f64,
    blocks: Option<Vec<f64>>,
}

impl LinearTrace {
    pub fn new(d: DMatrix<f64>) -> Self {
        let smoothness = d.norm();
        Self {
            d,
            smoothness,
            blocks: None,
        }
    }

    /// Uses `L_f` for each of `m` blocks.
    pub fn with_uniform_blocks(mut self, m: usize) -> Self {
        self.blocks = Some(vec![self.smoothness; m]);
        self
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    fn matrix_of<'a>(&self, x: &'a Point) -> Result<&'a DMatrix<f64>> {
        match x {
            Point::Orthogonal(y) | Point::Stiefel(y) if y.shape() == self.d.shape() => Ok(y),
            _ => Err(Error::DimensionMismatch(format!(
                "linear trace objective with D of shape {:?}",
                self.d.shape()
            ))),
        }
    }
}

impl Objective for LinearTrace {
    fn value(&self, x: &Point) -> Result<f64> {
        Ok(self.d.dot(self.matrix_of(x)?))
    }

    fn euclidean_gradient(&self, x: &Point) -> Result<Ambient> {
        self.matrix_of(x)?;
        Ok(Ambient::Matrix(self.d.clone()))
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }

    fn block_constants(&self) -> Option<&[f64]> {
        self.blocks.as_deref()
    }

    fn linear_trace(&self) -> Option<&DMatrix<f64>> {
        Some(&self.d)
    }
}

/// `f(x) = x^T Q x / 2 - b^T x` with `Q` symmetric positive semidefinite.
///
/// Accepts a Euclidean point or a product of Euclidean slots whose
/// concatenation has length `n`. With slot sizes registered through
/// [`Quadratic::with_blocks`], the block constants are `lambda_max(Q_kk)`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: DVector<f64>,
    smoothness: f64,
    blocks: Option<Vec<f64>>,
}

impl Quadratic {
    pub fn new(q: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if !q.is_square() || q.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "quadratic with Q {:?} and b of length {}",
                q.shape(),
                b.len()
            )));
        }
        let smoothness = max_eigenvalue(&q);
        Ok(Self {
            q,
            b,
            smoothness,
            blocks: None,
        })
    }

    pub fn with_blocks(mut self, sizes: &[usize]) -> Result<Self> {
        if sizes.iter().sum::<usize>() != self.b.len() {
            return Err(Error::DimensionMismatch("block sizes do not sum to n".into()));
        }
        let mut start = 0;
        let mut constants = Vec::with_capacity(sizes.len());
        for &s in sizes {
            constants.push(max_eigenvalue(&self.q.view((start, start), (s, s)).into_owned()));
            start += s;
        }
        self.blocks = Some(constants);
        Ok(self)
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    fn flatten(&self, x: &Point) -> Result<DVector<f64>> {
        let v = match x {
            Point::Euclidean(v) => v.clone(),
            Point::Product(parts) => {
                let mut all = Vec::with_capacity(self.b.len());
                for p in parts {
                    match p {
                        Point::Euclidean(v) => all.extend(v.iter().copied()),
                        _ => return Err(Error::DimensionMismatch("non-Euclidean slot".into())),
                    }
                }
                DVector::from_vec(all)
            }
            _ => return Err(Error::DimensionMismatch("quadratic needs a vector point".into())),
        };
        if v.len() != self.b.len() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for a quadratic in {} variables",
                v.len(),
                self.b.len()
            )));
        }
        Ok(v)
    }
}

impl Objective for Quadratic {
    fn value(&self, x: &Point) -> Result<f64> {
        let v = self.flatten(x)?;
        Ok(0.5 * v.dot(&(&self.q * &v)) - self.b.dot(&v))
    }

    fn euclidean_gradient(&self, x: &Point) -> Result<Ambient> {
        let v = self.flatten(x)?;
        let g = &self.q * &v - &self.b;
        Ok(match x {
            Point::Product(parts) => {
                let mut start = 0;
                let mut slots = Vec::with_capacity(parts.len());
                for p in parts {
                    let len = p.dimension();
                    slots.push(Ambient::Vector(g.rows(start, len).into_owned()));
                    start += len;
                }
                Ambient::Product(slots)
            }
            _ => Ambient::Vector(g),
        })
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }

    fn block_constants(&self) -> Option<&[f64]> {
        self.blocks.as_deref()
    }
}

fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;

    #[test]
    fn linear_trace_value_and_constant() {
        let d = DMatrix::from_fn(3, 3, |i, j| (i + 2 * j) as f64);
        let f = LinearTrace::new(d.clone());
        let y = Point::Orthogonal(random_orthogonal(3, 1));
        let want = (d.transpose() * y.as_matrix().unwrap()).trace();
        assert!((f.value(&y).unwrap() - want).abs() < 1e-12);
        assert_eq!(f.smoothness(), Some(d.norm()));
        assert!(f.value(&Point::Orthogonal(DMatrix::identity(2, 2))).is_err());
    }

    #[test]
    fn quadratic_block_constants() {
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0, 2.0, 3.0]));
        let f = Quadratic::new(q, DVector::zeros(4)).unwrap().with_blocks(&[2, 2]).unwrap();
        assert_eq!(f.block_constants().unwrap(), &[4.0, 3.0]);
        assert_eq!(f.smoothness(), Some(4.0));
    }

    #[test]
    fn quadratic_gradient_splits_over_slots() {
        let q = DMatrix::identity(3, 3);
        let b = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        let f = Quadratic::new(q, b).unwrap();
        let x = Point::Product(vec![
            Point::Euclidean(DVector::from_vec(vec![2.0])),
            Point::Euclidean(DVector::from_vec(vec![3.0, 4.0])),
        ]);
        match f.euclidean_gradient(&x).unwrap() {
            Ambient::Product(parts) => {
                assert_eq!(parts[0], Ambient::Vector(DVector::from_vec(vec![1.0])));
                assert_eq!(parts[1], Ambient::Vector(DVector::from_vec(vec![2.0, 3.0])));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!((f.value(&x).unwrap() - (0.5 * 29.0 - 9.0)).abs() < 1e-14);
    }
}
