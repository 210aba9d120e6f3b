//! Points, tangent vectors and the geometry operations TSD needs.
//!
//! Four geometries are supported: Euclidean space, the orthogonal group
//! `O_n` ([`orthogonal`]), the Stiefel manifold `St(p, n)` ([`stiefel`]) and
//! finite products of these. Tangent vectors do not carry their base point;
//! every operation takes the base explicitly and checks that the tangent
//! vector has the matching shape.
//!
//! | operation   | Euclidean | `O_n` | `St(p, n)` | product     |
//! |-------------|-----------|-------|------------|-------------|
//! | `exp`       | yes       | yes   | yes        | slot-wise   |
//! | `inv_exp`   | yes       | yes   | no         | slot-wise   |
//! | `transport` | identity  | yes   | no         | slot-wise   |

pub mod orthogonal;
pub mod stiefel;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{
    check_orthonormal, reorthonormalize_if_needed, SkewMatrix, INPUT_ORTHONORMALITY_TOL,
};
use crate::objective::Objective;
use crate::{Error, Result};

/// A point on one of the supported manifolds.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Euclidean(DVector<f64>),
    /// `n x n` with `Y^T Y = I`.
    Orthogonal(DMatrix<f64>),
    /// `n x p`, `p < n`, with `U^T U = I`.
    Stiefel(DMatrix<f64>),
    Product(Vec<Point>),
}

/// A tangent vector, stored in the representation of its geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum Tangent {
    Euclidean(DVector<f64>),
    /// Skew coefficient `A` of the tangent vector `Y A`.
    Orthogonal(SkewMatrix),
    /// Ambient `n x p` matrix `V` with `U^T V` skew.
    Stiefel(DMatrix<f64>),
    Product(Vec<Tangent>),
}

/// Euclidean gradient of an objective in the ambient space of a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Ambient {
    Vector(DVector<f64>),
    Matrix(DMatrix<f64>),
    Product(Vec<Ambient>),
}

impl Point {
    pub fn euclidean(v: DVector<f64>) -> Self {
        Point::Euclidean(v)
    }

    /// Validates that `y` is square with `||Y^T Y - I||_F <= 1e-10`.
    pub fn orthogonal(y: DMatrix<f64>) -> Result<Self> {
        if !y.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "orthogonal point must be square, got {:?}",
                y.shape()
            )));
        }
        check_orthonormal(&y, INPUT_ORTHONORMALITY_TOL)?;
        Ok(Point::Orthogonal(y))
    }

    /// Validates `p < n` and `||U^T U - I||_F <= 1e-10`.
    pub fn stiefel(u: DMatrix<f64>) -> Result<Self> {
        let (n, p) = u.shape();
        if p == 0 || p >= n {
            return Err(Error::DimensionMismatch(format!(
                "Stiefel point needs 0 < p < n, got {n} x {p}"
            )));
        }
        check_orthonormal(&u, INPUT_ORTHONORMALITY_TOL)?;
        Ok(Point::Stiefel(u))
    }

    pub fn product(parts: Vec<Point>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::DimensionMismatch("empty product".into()));
        }
        Ok(Point::Product(parts))
    }

    /// Dimension of the tangent space.
    pub fn dimension(&self) -> usize {
        match self {
            Point::Euclidean(v) => v.len(),
            Point::Orthogonal(y) => y.nrows() * (y.nrows() - 1) / 2,
            Point::Stiefel(u) => stiefel::dimension(u.nrows(), u.ncols()),
            Point::Product(parts) => parts.iter().map(Point::dimension).sum(),
        }
    }

    pub fn as_matrix(&self) -> Option<&DMatrix<f64>> {
        match self {
            Point::Orthogonal(y) | Point::Stiefel(y) => Some(y),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&DVector<f64>> {
        match self {
            Point::Euclidean(v) => Some(v),
            _ => None,
        }
    }

    /// Bitwise-equal storage (same variant, shape and entries).
    pub fn same_as(&self, other: &Point) -> bool {
        fn bits_eq(a: &[f64], b: &[f64]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
        }
        match (self, other) {
            (Point::Euclidean(a), Point::Euclidean(b)) => bits_eq(a.as_slice(), b.as_slice()),
            (Point::Orthogonal(a), Point::Orthogonal(b)) | (Point::Stiefel(a), Point::Stiefel(b)) => {
                a.shape() == b.shape() && bits_eq(a.as_slice(), b.as_slice())
            }
            (Point::Product(a), Point::Product(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_as(y)),
            _ => false,
        }
    }

    /// Max-norm comparison of the underlying arrays.
    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        match (self, other) {
            (Point::Euclidean(a), Point::Euclidean(b)) => {
                a.len() == b.len() && (a - b).amax() <= tol
            }
            (Point::Orthogonal(a), Point::Orthogonal(b)) | (Point::Stiefel(a), Point::Stiefel(b)) => {
                a.shape() == b.shape() && (a - b).amax() <= tol
            }
            (Point::Product(a), Point::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol))
            }
            _ => false,
        }
    }
}

impl Tangent {
    /// Zero vector of the tangent space at `x`.
    pub fn zero_at(x: &Point) -> Tangent {
        match x {
            Point::Euclidean(v) => Tangent::Euclidean(DVector::zeros(v.len())),
            Point::Orthogonal(y) => Tangent::Orthogonal(SkewMatrix::zeros(y.nrows())),
            Point::Stiefel(u) => Tangent::Stiefel(DMatrix::zeros(u.nrows(), u.ncols())),
            Point::Product(parts) => Tangent::Product(parts.iter().map(Tangent::zero_at).collect()),
        }
    }

    pub fn scale(&self, a: f64) -> Tangent {
        match self {
            Tangent::Euclidean(v) => Tangent::Euclidean(v * a),
            Tangent::Orthogonal(s) => Tangent::Orthogonal(s * a),
            Tangent::Stiefel(m) => Tangent::Stiefel(m * a),
            Tangent::Product(parts) => Tangent::Product(parts.iter().map(|t| t.scale(a)).collect()),
        }
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Tangent) -> Result<Tangent> {
        Ok(match (self, other) {
            (Tangent::Euclidean(u), Tangent::Euclidean(v)) if u.len() == v.len() => {
                Tangent::Euclidean(u + v * a)
            }
            (Tangent::Orthogonal(u), Tangent::Orthogonal(v)) if u.dim() == v.dim() => {
                Tangent::Orthogonal(u + &(v * a))
            }
            (Tangent::Stiefel(u), Tangent::Stiefel(v)) if u.shape() == v.shape() => {
                Tangent::Stiefel(u + v * a)
            }
            (Tangent::Product(u), Tangent::Product(v)) if u.len() == v.len() => Tangent::Product(
                u.iter()
                    .zip(v)
                    .map(|(x, y)| x.axpy(a, y))
                    .collect::<Result<_>>()?,
            ),
            _ => {
                return Err(Error::DimensionMismatch(
                    "tangent vectors of different shapes".into(),
                ))
            }
        })
    }
}

/// Checks that `v` has the shape of a tangent vector at `x`.
pub fn check_anchor(x: &Point, v: &Tangent) -> Result<()> {
    let ok = match (x, v) {
        (Point::Euclidean(p), Tangent::Euclidean(t)) => p.len() == t.len(),
        (Point::Orthogonal(y), Tangent::Orthogonal(a)) => y.nrows() == a.dim(),
        (Point::Stiefel(u), Tangent::Stiefel(t)) => u.shape() == t.shape(),
        (Point::Product(ps), Tangent::Product(ts)) => {
            if ps.len() != ts.len() {
                false
            } else {
                for (p, t) in ps.iter().zip(ts) {
                    check_anchor(p, t)?;
                }
                true
            }
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BaseMismatch(format!(
            "{} tangent at {} point",
            tangent_kind(v),
            point_kind(x)
        )))
    }
}

fn point_kind(x: &Point) -> &'static str {
    match x {
        Point::Euclidean(_) => "Euclidean",
        Point::Orthogonal(_) => "orthogonal",
        Point::Stiefel(_) => "Stiefel",
        Point::Product(_) => "product",
    }
}

fn tangent_kind(v: &Tangent) -> &'static str {
    match v {
        Tangent::Euclidean(_) => "Euclidean",
        Tangent::Orthogonal(_) => "orthogonal",
        Tangent::Stiefel(_) => "Stiefel",
        Tangent::Product(_) => "product",
    }
}

/// Re-orthonormalizes matrix-valued slots of `x` whose residual exceeds
/// [`crate::linalg::REORTHONORMALIZE_TOL`]. Returns whether any changed.
pub fn reorthonormalize(x: &mut Point) -> bool {
    match x {
        Point::Euclidean(_) => false,
        Point::Orthogonal(y) | Point::Stiefel(y) => reorthonormalize_if_needed(y),
        Point::Product(parts) => parts.iter_mut().fold(false, |acc, p| reorthonormalize(p) || acc),
    }
}

/// Riemannian metric `<u, v>_x`.
pub fn metric(x: &Point, u: &Tangent, v: &Tangent) -> Result<f64> {
    check_anchor(x, u)?;
    check_anchor(x, v)?;
    Ok(metric_unchecked(x, u, v))
}

fn metric_unchecked(x: &Point, u: &Tangent, v: &Tangent) -> f64 {
    match (x, u, v) {
        (Point::Euclidean(_), Tangent::Euclidean(a), Tangent::Euclidean(b)) => a.dot(b),
        (Point::Orthogonal(_), Tangent::Orthogonal(a), Tangent::Orthogonal(b)) => {
            orthogonal::metric(a, b)
        }
        (Point::Stiefel(p), Tangent::Stiefel(a), Tangent::Stiefel(b)) => stiefel::metric(p, a, b),
        (Point::Product(ps), Tangent::Product(us), Tangent::Product(vs)) => ps
            .iter()
            .zip(us)
            .zip(vs)
            .map(|((p, a), b)| metric_unchecked(p, a, b))
            .sum(),
        _ => unreachable!("anchors checked by caller"),
    }
}

pub fn norm(x: &Point, v: &Tangent) -> Result<f64> {
    Ok(metric(x, v, v)?.max(0.0).sqrt())
}

/// Exponential map `Exp_x(v)`.
pub fn exp(x: &Point, v: &Tangent) -> Result<Point> {
    check_anchor(x, v)?;
    Ok(match (x, v) {
        (Point::Euclidean(p), Tangent::Euclidean(t)) => Point::Euclidean(p + t),
        (Point::Orthogonal(y), Tangent::Orthogonal(c)) => Point::Orthogonal(orthogonal::exp(y, c)),
        (Point::Stiefel(u), Tangent::Stiefel(t)) => Point::Stiefel(stiefel::exp(u, t)?),
        (Point::Product(ps), Tangent::Product(ts)) => Point::Product(
            ps.iter()
                .zip(ts)
                .map(|(p, t)| exp(p, t))
                .collect::<Result<_>>()?,
        ),
        _ => unreachable!("anchor checked"),
    })
}

/// Inverse exponential `Exp_x^{-1}(y)`, defined off the cut locus.
pub fn inv_exp(x: &Point, y: &Point) -> Result<Tangent> {
    Ok(match (x, y) {
        (Point::Euclidean(a), Point::Euclidean(b)) if a.len() == b.len() => {
            Tangent::Euclidean(b - a)
        }
        (Point::Orthogonal(a), Point::Orthogonal(b)) if a.shape() == b.shape() => {
            Tangent::Orthogonal(orthogonal::inv_exp(a, b)?)
        }
        (Point::Stiefel(_), Point::Stiefel(_)) => {
            return Err(Error::Unsupported("inverse exponential on the Stiefel manifold"))
        }
        (Point::Product(a), Point::Product(b)) if a.len() == b.len() => Tangent::Product(
            a.iter()
                .zip(b)
                .map(|(p, q)| inv_exp(p, q))
                .collect::<Result<_>>()?,
        ),
        _ => {
            return Err(Error::DimensionMismatch(
                "inverse exponential between points of different shapes".into(),
            ))
        }
    })
}

/// Parallel transport of `w` along `t -> Exp_x(t dir)` from `t = 0` to
/// `t = 1`. The result is a tangent vector at `exp(x, dir)`.
pub fn transport(x: &Point, dir: &Tangent, w: &Tangent) -> Result<Tangent> {
    check_anchor(x, dir)?;
    check_anchor(x, w)?;
    Ok(match (x, dir, w) {
        (Point::Euclidean(_), _, _) => w.clone(),
        (Point::Orthogonal(_), Tangent::Orthogonal(c), Tangent::Orthogonal(a)) => {
            Tangent::Orthogonal(orthogonal::transport(c, a))
        }
        (Point::Stiefel(_), _, _) => {
            return Err(Error::Unsupported("parallel transport on the Stiefel manifold"))
        }
        (Point::Product(ps), Tangent::Product(ds), Tangent::Product(ws)) => Tangent::Product(
            ps.iter()
                .zip(ds)
                .zip(ws)
                .map(|((p, d), v)| transport(p, d, v))
                .collect::<Result<_>>()?,
        ),
        _ => unreachable!("anchors checked"),
    })
}

/// Geodesic distance `||Exp_x^{-1}(y)||_x`.
pub fn distance(x: &Point, y: &Point) -> Result<f64> {
    norm(x, &inv_exp(x, y)?)
}

/// Converts a Euclidean gradient into the Riemannian gradient at `x`.
pub fn riemannian_gradient(x: &Point, egrad: &Ambient) -> Result<Tangent> {
    Ok(match (x, egrad) {
        (Point::Euclidean(p), Ambient::Vector(g)) if p.len() == g.len() => {
            Tangent::Euclidean(g.clone())
        }
        (Point::Orthogonal(y), Ambient::Matrix(g)) if y.shape() == g.shape() => {
            Tangent::Orthogonal(orthogonal::gradient(y, g))
        }
        (Point::Stiefel(u), Ambient::Matrix(g)) if u.shape() == g.shape() => {
            Tangent::Stiefel(stiefel::gradient(u, g))
        }
        (Point::Product(ps), Ambient::Product(gs)) if ps.len() == gs.len() => Tangent::Product(
            ps.iter()
                .zip(gs)
                .map(|(p, g)| riemannian_gradient(p, g))
                .collect::<Result<_>>()?,
        ),
        _ => {
            return Err(Error::DimensionMismatch(
                "Euclidean gradient does not match the point".into(),
            ))
        }
    })
}

/// Riemannian gradient of `obj` at `x`.
pub fn rgrad(obj: &dyn Objective, x: &Point) -> Result<Tangent> {
    riemannian_gradient(x, &obj.euclidean_gradient(x)?)
}

/// Tangent vector obtained from an ambient direction: the identity on
/// Euclidean slots, `skew(Y^T Z)` on `O_n`, and removal of the symmetric part
/// of `U^T Z` on `St(p, n)`.
pub fn project_ambient(x: &Point, z: &Ambient) -> Result<Tangent> {
    Ok(match (x, z) {
        (Point::Euclidean(p), Ambient::Vector(v)) if p.len() == v.len() => {
            Tangent::Euclidean(v.clone())
        }
        (Point::Orthogonal(y), Ambient::Matrix(m)) if y.shape() == m.shape() => {
            Tangent::Orthogonal(SkewMatrix::skew_part(&(y.transpose() * m)))
        }
        (Point::Stiefel(u), Ambient::Matrix(m)) if u.shape() == m.shape() => {
            Tangent::Stiefel(stiefel::project(u, m))
        }
        (Point::Product(ps), Ambient::Product(zs)) if ps.len() == zs.len() => Tangent::Product(
            ps.iter()
                .zip(zs)
                .map(|(p, q)| project_ambient(p, q))
                .collect::<Result<_>>()?,
        ),
        _ => {
            return Err(Error::DimensionMismatch(
                "ambient direction does not match the point".into(),
            ))
        }
    })
}

/// Coordinates of `v` in the orthonormal frame returned by [`tangent_frame`].
pub fn coordinates(x: &Point, v: &Tangent) -> Result<DVector<f64>> {
    check_anchor(x, v)?;
    let mut out = Vec::with_capacity(x.dimension());
    push_coordinates(x, v, &mut out)?;
    Ok(DVector::from_vec(out))
}

fn push_coordinates(x: &Point, v: &Tangent, out: &mut Vec<f64>) -> Result<()> {
    match (x, v) {
        (Point::Euclidean(_), Tangent::Euclidean(t)) => out.extend(t.iter().copied()),
        (Point::Orthogonal(_), Tangent::Orthogonal(a)) => out.extend(orthogonal::coordinates(a)),
        (Point::Stiefel(u), Tangent::Stiefel(t)) => out.extend(stiefel::coordinates(u, t)?),
        (Point::Product(ps), Tangent::Product(ts)) => {
            for (p, t) in ps.iter().zip(ts) {
                push_coordinates(p, t, out)?;
            }
        }
        _ => unreachable!("anchor checked"),
    }
    Ok(())
}

/// Tangent vector at `x` with the given frame coordinates.
pub fn from_coordinates(x: &Point, coords: &DVector<f64>) -> Result<Tangent> {
    if coords.len() != x.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for a {}-dimensional tangent space",
            coords.len(),
            x.dimension()
        )));
    }
    build_from_coordinates(x, coords.as_slice())
}

fn build_from_coordinates(x: &Point, c: &[f64]) -> Result<Tangent> {
    Ok(match x {
        Point::Euclidean(_) => Tangent::Euclidean(DVector::from_column_slice(c)),
        Point::Orthogonal(y) => Tangent::Orthogonal(orthogonal::from_coordinates(y.nrows(), c)),
        Point::Stiefel(u) => Tangent::Stiefel(stiefel::from_coordinates(u, c)?),
        Point::Product(ps) => {
            let mut offset = 0;
            let mut parts = Vec::with_capacity(ps.len());
            for p in ps {
                let d = p.dimension();
                parts.push(build_from_coordinates(p, &c[offset..offset + d])?);
                offset += d;
            }
            Tangent::Product(parts)
        }
    })
}

/// Orthonormal basis of the tangent space at `x`.
pub fn tangent_frame(x: &Point) -> Result<Vec<Tangent>> {
    let d = x.dimension();
    (0..d)
        .map(|k| {
            let mut e = DVector::zeros(d);
            e[k] = 1.0;
            from_coordinates(x, &e)
        })
        .collect()
}
