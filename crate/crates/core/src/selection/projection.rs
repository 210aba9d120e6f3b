use nalgebra::{DMatrix, DVector};

use super::partition::pairs_disjoint;
use crate::linalg::SkewMatrix;
use crate::manifold::{self, check_anchor, coordinates, metric, tangent_frame, Point, Tangent};
use crate::{Error, Result};

/// Structural description of the image of a projection.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionKind {
    /// The whole tangent space.
    Identity,
    /// One slot of a product manifold.
    Slot(usize),
    /// `span{H_ij : (i, j) in pairs}` on `O_n` (coefficient masking).
    SkewPairs(Vec<(usize, usize)>),
    /// `span{U H_ij}` on `St(p, n)`.
    StiefelPair { i: usize, j: usize },
    /// `span{v e_l^T}` on `St(p, n)` with `v` a unit vector orthogonal to `U`.
    StiefelKernel { direction: DVector<f64>, column: usize },
    /// Span of a metric-orthonormal family.
    Span(Vec<Tangent>),
}

/// Orthogonal projection of the tangent space at `base` onto a subspace.
#[derive(Clone, Debug)]
pub struct SubspaceProjection {
    base: Point,
    kind: ProjectionKind,
    block: Option<usize>,
}

impl SubspaceProjection {
    pub fn identity(base: Point) -> Self {
        Self {
            base,
            kind: ProjectionKind::Identity,
            block: None,
        }
    }

    /// Projection onto slot `k` of a product point.
    pub fn slot(base: Point, k: usize) -> Result<Self> {
        match &base {
            Point::Product(parts) if k < parts.len() => Ok(Self {
                base,
                kind: ProjectionKind::Slot(k),
                block: Some(k),
            }),
            Point::Product(parts) => Err(Error::InvalidArgument(format!(
                "slot {k} of a {}-fold product",
                parts.len()
            ))),
            _ => Err(Error::InvalidArgument("slot projection needs a product point".into())),
        }
    }

    /// Projection onto `span{H_ij}` at an orthogonal point.
    pub fn skew_pairs(base: Point, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = match &base {
            Point::Orthogonal(y) => y.nrows(),
            _ => return Err(Error::InvalidArgument("Givens projection needs an O_n point".into())),
        };
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= j || j >= n) {
            return Err(Error::InvalidArgument(format!("invalid pair ({i}, {j}) for n = {n}")));
        }
        let mut sorted = pairs.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("repeated pair {:?}", w[0])));
        }
        Ok(Self {
            base,
            kind: ProjectionKind::SkewPairs(pairs),
            block: None,
        })
    }

    pub fn stiefel_pair(base: Point, i: usize, j: usize) -> Result<Self> {
        match &base {
            Point::Stiefel(u) if i < j && j < u.ncols() => Ok(Self {
                base,
                kind: ProjectionKind::StiefelPair { i, j },
                block: None,
            }),
            _ => Err(Error::InvalidArgument(format!(
                "Stiefel pair ({i}, {j}) needs a Stiefel point with i < j < p"
            ))),
        }
    }

    /// `direction` must be a unit vector orthogonal to `span(U)` (checked to
    /// `1e-10`).
    pub fn stiefel_kernel(base: Point, direction: DVector<f64>, column: usize) -> Result<Self> {
        match &base {
            Point::Stiefel(u) if column < u.ncols() && direction.len() == u.nrows() => {
                let off = (u.transpose() * &direction).norm();
                let unit = (direction.norm() - 1.0).abs();
                if off > 1e-10 || unit > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "kernel direction must be a unit vector orthogonal to U \
                         (|U^T v| = {off:.2e}, ||v|| - 1 = {unit:.2e})"
                    )));
                }
                Ok(Self {
                    base,
                    kind: ProjectionKind::StiefelKernel { direction, column },
                    block: None,
                })
            }
            _ => Err(Error::InvalidArgument(
                "kernel projection needs a Stiefel point and matching direction".into(),
            )),
        }
    }

    /// Projection onto the span of `vectors`, orthonormalized under the metric
    /// at `base` (modified Gram-Schmidt, two passes). Numerically dependent
    /// vectors are dropped.
    pub fn onto_span(base: Point, vectors: &[Tangent]) -> Result<Self> {
        let mut basis: Vec<Tangent> = Vec::with_capacity(vectors.len());
        for v in vectors {
            check_anchor(&base, v)?;
            let scale = manifold::norm(&base, v)?;
            if scale == 0.0 {
                continue;
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = metric(&base, b, &w)?;
                    w = w.axpy(-c, b)?;
                }
            }
            let r = manifold::norm(&base, &w)?;
            if r > 1e-10 * scale {
                basis.push(w.scale(1.0 / r));
            }
        }
        Ok(Self {
            base,
            kind: ProjectionKind::Span(basis),
            block: None,
        })
    }

    pub fn with_block(mut self, k: usize) -> Self {
        self.block = Some(k);
        self
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn kind(&self) -> &ProjectionKind {
        &self.kind
    }

    /// Index of the block this projection was drawn from, if any.
    pub fn block(&self) -> Option<usize> {
        self.block
    }

    /// The pairs of a Givens projection whose indices are pairwise disjoint.
    pub fn disjoint_pairs(&self) -> Option<&[(usize, usize)]> {
        match (&self.kind, &self.base) {
            (ProjectionKind::SkewPairs(pairs), Point::Orthogonal(y))
                if pairs_disjoint(y.nrows(), pairs) =>
            {
                Some(pairs)
            }
            _ => None,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            ProjectionKind::Identity => self.base.dimension(),
            ProjectionKind::Slot(k) => match &self.base {
                Point::Product(parts) => parts[*k].dimension(),
                _ => unreachable!("validated at construction"),
            },
            ProjectionKind::SkewPairs(pairs) => pairs.len(),
            ProjectionKind::StiefelPair { .. } | ProjectionKind::StiefelKernel { .. } => 1,
            ProjectionKind::Span(basis) => basis.len(),
        }
    }

    /// Applies the projection to a tangent vector at the base point.
    pub fn apply(&self, v: &Tangent) -> Result<Tangent> {
        check_anchor(&self.base, v)?;
        Ok(match (&self.kind, &self.base, v) {
            (ProjectionKind::Identity, _, _) => v.clone(),
            (ProjectionKind::Slot(k), _, Tangent::Product(parts)) => Tangent::Product(
                parts
                    .iter()
                    .enumerate()
                    .map(|(s, t)| if s == *k { t.clone() } else { t.scale(0.0) })
                    .collect(),
            ),
            (ProjectionKind::SkewPairs(pairs), _, Tangent::Orthogonal(a)) => {
                Tangent::Orthogonal(a.masked(pairs))
            }
            (ProjectionKind::StiefelPair { i, j }, Point::Stiefel(u), Tangent::Stiefel(w)) => {
                // a_ij of the skew part of U^T W; image a_ij U H_ij.
                let a = 0.5 * (u.column(*i).dot(&w.column(*j)) - u.column(*j).dot(&w.column(*i)));
                let mut out = DMatrix::zeros(u.nrows(), u.ncols());
                out.set_column(*j, &(u.column(*i) * a));
                out.set_column(*i, &(u.column(*j) * -a));
                Tangent::Stiefel(out)
            }
            (
                ProjectionKind::StiefelKernel { direction, column },
                Point::Stiefel(u),
                Tangent::Stiefel(w),
            ) => {
                let c = direction.dot(&w.column(*column));
                let mut out = DMatrix::zeros(u.nrows(), u.ncols());
                out.set_column(*column, &(direction * c));
                Tangent::Stiefel(out)
            }
            (ProjectionKind::Span(basis), _, _) => {
                let mut out = Tangent::zero_at(&self.base);
                for b in basis {
                    out = out.axpy(metric(&self.base, b, v)?, b)?;
                }
                out
            }
            _ => unreachable!("kind and base validated at construction"),
        })
    }

    /// Metric-orthonormal basis of the image.
    pub fn image_basis(&self) -> Result<Vec<Tangent>> {
        Ok(match (&self.kind, &self.base) {
            (ProjectionKind::Identity, base) => tangent_frame(base)?,
            (ProjectionKind::Slot(k), Point::Product(parts)) => {
                let zeros: Vec<Tangent> = parts.iter().map(Tangent::zero_at).collect();
                tangent_frame(&parts[*k])?
                    .into_iter()
                    .map(|t| {
                        let mut slots = zeros.clone();
                        slots[*k] = t;
                        Tangent::Product(slots)
                    })
                    .collect()
            }
            (ProjectionKind::SkewPairs(pairs), Point::Orthogonal(y)) => pairs
                .iter()
                .map(|&(i, j)| {
                    Tangent::Orthogonal(&SkewMatrix::basis(y.nrows(), i, j) * std::f64::consts::FRAC_1_SQRT_2)
                })
                .collect(),
            (ProjectionKind::StiefelPair { i, j }, Point::Stiefel(u)) => {
                let mut m = DMatrix::zeros(u.nrows(), u.ncols());
                m.set_column(*j, &u.column(*i));
                m.set_column(*i, &(-u.column(*j)));
                vec![Tangent::Stiefel(m)]
            }
            (ProjectionKind::StiefelKernel { direction, column }, Point::Stiefel(u)) => {
                let mut m = DMatrix::zeros(u.nrows(), u.ncols());
                m.set_column(*column, direction);
                vec![Tangent::Stiefel(m)]
            }
            (ProjectionKind::Span(basis), _) => basis.clone(),
            _ => unreachable!("kind and base validated at construction"),
        })
    }

    /// Matrix of the projection in the frame coordinates of the base point.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        let d = self.base.dimension();
        let basis = self.image_basis()?;
        let mut c = DMatrix::zeros(d, basis.len());
        for (k, b) in basis.iter().enumerate() {
            c.set_column(k, &coordinates(&self.base, b)?);
        }
        Ok(&c * c.transpose())
    }
}

/// `U P U^{-1}` for a linear isometry `U` from `T_source` to `T_target`: the
/// projection onto the image under `U` of the range of `P`.
///
/// The isometry is checked on a frame of `T_source` (Gram matrix within
/// `1e-10` of the identity).
pub fn conjugated_projection<F>(
    source: &Point,
    target: &Point,
    iso: F,
    p: &SubspaceProjection,
) -> Result<SubspaceProjection>
where
    F: Fn(&Tangent) -> Result<Tangent>,
{
    if !p.base.approx_eq(source, 1e-12) {
        return Err(Error::BaseMismatch("projection is not based at the source point".into()));
    }
    let images: Vec<Tangent> = tangent_frame(source)?
        .iter()
        .map(&iso)
        .collect::<Result<_>>()?;
    let mut distortion: f64 = 0.0;
    for (a, u) in images.iter().enumerate() {
        for (b, v) in images.iter().enumerate().skip(a) {
            let want = if a == b { 1.0 } else { 0.0 };
            distortion = distortion.max((metric(target, u, v)? - want).abs());
        }
    }
    if distortion > 1e-10 {
        return Err(Error::NotIsometric(distortion));
    }
    conjugate_unchecked(target, iso, p)
}

pub(crate) fn conjugate_unchecked<F>(
    target: &Point,
    iso: F,
    p: &SubspaceProjection,
) -> Result<SubspaceProjection>
where
    F: Fn(&Tangent) -> Result<Tangent>,
{
    let mapped: Vec<Tangent> = p.image_basis()?.iter().map(iso).collect::<Result<_>>()?;
    let mut out = SubspaceProjection::onto_span(target.clone(), &mapped)?;
    out.block = p.block;
    Ok(out)
}
