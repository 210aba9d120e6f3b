use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use super::partition::GivensPartition;
use super::projection::{conjugate_unchecked, SubspaceProjection};
use crate::linalg::{gaussian_vector, seeded_rng, Rng64};
use crate::manifold::{coordinates, inv_exp, transport, Point};
use crate::{Error, Result};

/// Whether a rule is a deterministic sequence or a random draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Deterministic,
    Randomized,
}

/// Produces the projection `P_k` used at inner step `k` of an outer
/// iteration, given the anchor `y^{t,0}` and the current inner iterate
/// `y^{t,k-1}`.
pub trait SelectionRule {
    fn kind(&self) -> RuleKind;

    /// Number `m` of inner steps per outer iteration; 1 for randomized rules.
    fn blocks_per_iteration(&self) -> usize;

    fn select(&mut self, anchor: &Point, current: &Point, k: usize) -> Result<SubspaceProjection>;
}

/// Factory building a decomposition of the tangent space at a point.
pub type DecompositionFactory = Box<dyn Fn(&Point) -> Result<Vec<SubspaceProjection>>>;

/// Cyclic block coordinate rule on a product manifold: step `k` projects onto
/// slot `k`.
#[derive(Clone, Debug)]
pub struct ProductRule {
    slots: usize,
}

impl ProductRule {
    pub fn new(slots: usize) -> Self {
        Self { slots }
    }
}

impl SelectionRule for ProductRule {
    fn kind(&self) -> RuleKind {
        RuleKind::Deterministic
    }

    fn blocks_per_iteration(&self) -> usize {
        self.slots
    }

    fn select(&mut self, _anchor: &Point, current: &Point, k: usize) -> Result<SubspaceProjection> {
        match current {
            Point::Product(parts) if parts.len() == self.slots => SubspaceProjection::slot(current.clone(), k),
            _ => Err(Error::InvalidArgument(format!(
                "product rule with {} slots applied to a different point",
                self.slots
            ))),
        }
    }
}

/// Fixes an orthogonal decomposition `{P'_k}` at the anchor and transports it
/// to the current iterate along the geodesic from the anchor:
/// `P_k = Gamma P'_k Gamma^{-1}`.
pub struct ParallelTransportRule {
    factory: DecompositionFactory,
    m: usize,
    cache: Option<(Point, Vec<SubspaceProjection>)>,
}

impl ParallelTransportRule {
    /// `factory` must return `m` projections at the given point that are
    /// mutually orthogonal and sum to the identity; this is checked when the
    /// decomposition is first built at an anchor.
    pub fn new(m: usize, factory: DecompositionFactory) -> Self {
        Self {
            factory,
            m,
            cache: None,
        }
    }

    fn decomposition(&mut self, anchor: &Point) -> Result<&[SubspaceProjection]> {
        let stale = match &self.cache {
            Some((p, _)) => p != anchor,
            None => true,
        };
        if stale {
            let decomp = (self.factory)(anchor)?;
            check_decomposition(anchor, &decomp, self.m)?;
            self.cache = Some((anchor.clone(), decomp));
        }
        Ok(&self.cache.as_ref().expect("filled above").1)
    }
}

/// Checks that `decomp` has `m` members based at `x` whose frame matrices sum
/// to the identity (mutually orthogonal ranges covering the tangent space).
pub fn check_decomposition(x: &Point, decomp: &[SubspaceProjection], m: usize) -> Result<()> {
    if decomp.len() != m {
        return Err(Error::InvalidDecomposition(format!(
            "expected {m} projections, got {}",
            decomp.len()
        )));
    }
    let d = x.dimension();
    let mut sum = DMatrix::<f64>::zeros(d, d);
    for p in decomp {
        if !p.base().approx_eq(x, 0.0) {
            return Err(Error::InvalidDecomposition("projection based elsewhere".into()));
        }
        sum += p.matrix()?;
    }
    let residual = (sum - DMatrix::<f64>::identity(d, d)).amax();
    if residual > 1e-10 {
        return Err(Error::InvalidDecomposition(format!(
            "projections do not sum to the identity (residual {residual:.2e})"
        )));
    }
    Ok(())
}

impl SelectionRule for ParallelTransportRule {
    fn kind(&self) -> RuleKind {
        RuleKind::Deterministic
    }

    fn blocks_per_iteration(&self) -> usize {
        self.m
    }

    fn select(&mut self, anchor: &Point, current: &Point, k: usize) -> Result<SubspaceProjection> {
        let anchor = anchor.clone();
        let p = self.decomposition(&anchor)?[k].clone().with_block(k);
        if current == &anchor {
            return Ok(p);
        }
        let dir = inv_exp(&anchor, current)?;
        conjugate_unchecked(current, |w| transport(&anchor, &dir, w), &p)
    }
}

/// Cyclic Givens rule on `O_n`: step `k` projects onto `span{H_ij : (i, j) in
/// B_k}` at the current iterate.
#[derive(Clone, Debug)]
pub struct GivensRule {
    partition: GivensPartition,
}

impl GivensRule {
    /// Requires pairwise disjoint indices inside each block, so that every
    /// step is a product of commuting plane rotations costing `O(n)` per pair.
    pub fn new(partition: GivensPartition) -> Result<Self> {
        if !partition.has_disjoint_indices() {
            return Err(Error::InvalidPartition(
                "blocks must have pairwise disjoint indices for the rotation fast path".into(),
            ));
        }
        Ok(Self { partition })
    }

    /// Accepts blocks with overlapping indices; steps then fall back to the
    /// dense exponential.
    pub fn general(partition: GivensPartition) -> Self {
        Self { partition }
    }

    pub fn partition(&self) -> &GivensPartition {
        &self.partition
    }
}

impl SelectionRule for GivensRule {
    fn kind(&self) -> RuleKind {
        RuleKind::Deterministic
    }

    fn blocks_per_iteration(&self) -> usize {
        self.partition.len()
    }

    fn select(&mut self, _anchor: &Point, current: &Point, k: usize) -> Result<SubspaceProjection> {
        match current {
            Point::Orthogonal(y) if y.nrows() == self.partition.n() => Ok(
                SubspaceProjection::skew_pairs(current.clone(), self.partition.blocks()[k].clone())?
                    .with_block(k),
            ),
            _ => Err(Error::InvalidArgument(format!(
                "Givens rule for n = {} applied to a different point",
                self.partition.n()
            ))),
        }
    }
}

/// Validates a probability vector: positive, finite, summing to one within
/// `1e-12`.
pub fn validate_probabilities(probs: &[f64], expected_len: usize) -> Result<()> {
    if probs.len() != expected_len {
        return Err(Error::InvalidProbabilities(format!(
            "expected {expected_len} probabilities, got {}",
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::InvalidProbabilities(format!("entry {p} is not positive")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
    }
    Ok(())
}

fn sampler(probs: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(probs).map_err(|e| Error::InvalidProbabilities(e.to_string()))
}

/// Draws `P_k` from a finite decomposition with probability `p_k`.
pub struct RandomizedFiniteRule {
    factory: DecompositionFactory,
    probs: Vec<f64>,
    dist: WeightedIndex<f64>,
    rng: Rng64,
}

impl RandomizedFiniteRule {
    pub fn new(factory: DecompositionFactory, probs: Vec<f64>, seed: u64) -> Result<Self> {
        validate_probabilities(&probs, probs.len())?;
        let dist = sampler(&probs)?;
        Ok(Self {
            factory,
            probs,
            dist,
            rng: seeded_rng(seed),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

impl SelectionRule for RandomizedFiniteRule {
    fn kind(&self) -> RuleKind {
        RuleKind::Randomized
    }

    fn blocks_per_iteration(&self) -> usize {
        1
    }

    fn select(&mut self, _anchor: &Point, current: &Point, _k: usize) -> Result<SubspaceProjection> {
        let decomp = (self.factory)(current)?;
        if decomp.len() != self.probs.len() {
            return Err(Error::InvalidDecomposition(format!(
                "{} projections for {} probabilities",
                decomp.len(),
                self.probs.len()
            )));
        }
        let k = self.dist.sample(&mut self.rng);
        Ok(decomp[k].clone().with_block(k))
    }
}

/// Randomized rule on `O_n`: draws `span{H_ij}` with probability `p_ij`
/// (pairs in lexicographic order). The norm-equivalence constant is
/// `C^2 = min p_ij`.
#[derive(Clone, Debug)]
pub struct RandomizedOrthogonalRule {
    n: usize,
    pairs: Vec<(usize, usize)>,
    probs: Vec<f64>,
    dist: WeightedIndex<f64>,
    rng: Rng64,
}

impl RandomizedOrthogonalRule {
    pub fn new(n: usize, probs: Vec<f64>, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("randomized O_n rule needs n >= 2".into()));
        }
        let pairs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        validate_probabilities(&probs, pairs.len())?;
        let dist = sampler(&probs)?;
        Ok(Self {
            n,
            pairs,
            probs,
            dist,
            rng: seeded_rng(seed),
        })
    }

    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        let m = n * n.saturating_sub(1) / 2;
        Self::new(n, vec![1.0 / m as f64; m], seed)
    }

    pub fn constant(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

impl SelectionRule for RandomizedOrthogonalRule {
    fn kind(&self) -> RuleKind {
        RuleKind::Randomized
    }

    fn blocks_per_iteration(&self) -> usize {
        1
    }

    fn select(&mut self, _anchor: &Point, current: &Point, _k: usize) -> Result<SubspaceProjection> {
        match current {
            Point::Orthogonal(y) if y.nrows() == self.n => {}
            _ => return Err(Error::InvalidArgument("randomized O_n rule on a different point".into())),
        }
        let k = self.dist.sample(&mut self.rng);
        Ok(SubspaceProjection::skew_pairs(current.clone(), vec![self.pairs[k]])?.with_block(k))
    }
}

/// Outcome of one draw of the randomized Stiefel rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StiefelOutcome {
    /// `span{U H_ij}`, `i < j < p`.
    Pair(usize, usize),
    /// `span{v e_l^T}` with `v` uniform on the unit sphere of `span(U)^perp`.
    Kernel(usize),
}

/// Randomized rule on `St(p, n)`, `p < n`. Draws `span{U H_ij}` with
/// probability `p_ij`, or column `l` with probability `p_l` together with a
/// direction `v = (I - U U^T) z / ||(I - U U^T) z||`, `z` Gaussian.
///
/// ```text
/// E ||P W||^2 = sum p_ij a_ij^2 + sum p_l ||b_l||^2 / (n - p)
/// C^2         = min(min p_ij, min p_l / (n - p))
/// ```
///
/// with `a_ij` the entries of `U^T W` and `b_l` the columns of
/// `(I - U U^T) W`.
#[derive(Clone, Debug)]
pub struct RandomizedStiefelRule {
    n: usize,
    p: usize,
    outcomes: Vec<StiefelOutcome>,
    probs: Vec<f64>,
    dist: WeightedIndex<f64>,
    rng: Rng64,
}

impl RandomizedStiefelRule {
    /// `pair_probs` in lexicographic pair order (`p (p - 1) / 2` entries),
    /// followed conceptually by `column_probs` (`p` entries); together they
    /// must sum to one.
    pub fn new(n: usize, p: usize, pair_probs: &[f64], column_probs: &[f64], seed: u64) -> Result<Self> {
        if p == 0 || p >= n {
            return Err(Error::InvalidArgument(format!(
                "randomized Stiefel rule needs 0 < p < n, got p = {p}, n = {n}"
            )));
        }
        let mut outcomes: Vec<_> = (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| StiefelOutcome::Pair(i, j)))
            .collect();
        if pair_probs.len() != outcomes.len() || column_probs.len() != p {
            return Err(Error::InvalidProbabilities(format!(
                "expected {} pair and {p} column probabilities",
                outcomes.len()
            )));
        }
        outcomes.extend((0..p).map(StiefelOutcome::Kernel));
        let probs: Vec<f64> = pair_probs.iter().chain(column_probs).copied().collect();
        validate_probabilities(&probs, outcomes.len())?;
        let dist = sampler(&probs)?;
        Ok(Self {
            n,
            p,
            outcomes,
            probs,
            dist,
            rng: seeded_rng(seed),
        })
    }

    /// Equal probability for each of the `p (p - 1) / 2 + p` outcomes.
    pub fn uniform(n: usize, p: usize, seed: u64) -> Result<Self> {
        let count = p * p.saturating_sub(1) / 2 + p;
        let q = 1.0 / count as f64;
        Self::new(n, p, &vec![q; count - p], &vec![q; p], seed)
    }

    pub fn outcomes(&self) -> &[StiefelOutcome] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn constant(&self) -> f64 {
        let kernel_scale = (self.n - self.p) as f64;
        self.outcomes
            .iter()
            .zip(&self.probs)
            .map(|(o, &q)| match o {
                StiefelOutcome::Pair(..) => q,
                StiefelOutcome::Kernel(_) => q / kernel_scale,
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed-form `E ||P W||^2` at `U`.
    pub fn expected_squared_norm(&self, u: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
        let utw = u.transpose() * w;
        let b = w - u * &utw;
        let kernel_scale = (self.n - self.p) as f64;
        self.outcomes
            .iter()
            .zip(&self.probs)
            .map(|(o, &q)| match *o {
                StiefelOutcome::Pair(i, j) => {
                    let a = 0.5 * (utw[(i, j)] - utw[(j, i)]);
                    q * a * a
                }
                StiefelOutcome::Kernel(l) => q * b.column(l).norm_squared() / kernel_scale,
            })
            .sum()
    }

    fn kernel_direction(&mut self, u: &DMatrix<f64>) -> DVector<f64> {
        loop {
            let z = gaussian_vector(self.n, &mut self.rng);
            let v = &z - u * (u.transpose() * &z);
            let norm = v.norm();
            if norm >= 1e-12 {
                return v / norm;
            }
        }
    }
}

impl SelectionRule for RandomizedStiefelRule {
    fn kind(&self) -> RuleKind {
        RuleKind::Randomized
    }

    fn blocks_per_iteration(&self) -> usize {
        1
    }

    fn select(&mut self, _anchor: &Point, current: &Point, _k: usize) -> Result<SubspaceProjection> {
        let u = match current {
            Point::Stiefel(u) if u.shape() == (self.n, self.p) => u,
            _ => return Err(Error::InvalidArgument("randomized Stiefel rule on a different point".into())),
        };
        let k = self.dist.sample(&mut self.rng);
        let proj = match self.outcomes[k] {
            StiefelOutcome::Pair(i, j) => SubspaceProjection::stiefel_pair(current.clone(), i, j)?,
            StiefelOutcome::Kernel(l) => {
                let v = self.kernel_direction(u);
                SubspaceProjection::stiefel_kernel(current.clone(), v, l)?
            }
        };
        Ok(proj.with_block(k))
    }
}

/// Singleton Givens decomposition `{span{H_ij}}` at an orthogonal point.
pub fn singleton_givens_decomposition(x: &Point) -> Result<Vec<SubspaceProjection>> {
    let n = match x {
        Point::Orthogonal(y) => y.nrows(),
        _ => return Err(Error::InvalidArgument("Givens decomposition needs an O_n point".into())),
    };
    GivensPartition::singleton(n)
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| Ok(SubspaceProjection::skew_pairs(x.clone(), b.clone())?.with_block(k)))
        .collect()
}

/// Coordinates of the projections' ranges stacked as columns; used by tests
/// and verification to compare decompositions.
pub fn range_coordinates(p: &SubspaceProjection) -> Result<DMatrix<f64>> {
    let basis = p.image_basis()?;
    let d = p.base().dimension();
    let mut c = DMatrix::zeros(d, basis.len());
    for (k, b) in basis.iter().enumerate() {
        c.set_column(k, &coordinates(p.base(), b)?);
    }
    Ok(c)
}
