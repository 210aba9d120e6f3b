//! Monte Carlo estimate of the constant in `E ||P v||^2 >= C^2 ||v||^2`.

use nalgebra::DVector;

use crate::linalg::{gaussian_vector, seeded_rng};
use crate::manifold::{self, Point, Tangent};
use crate::selection::{RuleKind, SelectionRule};
use crate::{Error, Result};

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Debug)]
pub struct ProbeEstimate {
    /// Unit tangent probe `v`.
    pub direction: Tangent,
    /// Sample mean of `||P v||^2`.
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
}

#[derive(Clone, Debug)]
pub struct RandomizedConstantEstimate {
    /// Minimum over probes of the estimated `E ||P v||^2`.
    pub c2_hat: f64,
    /// Standard error of the minimizing probe.
    pub c2_std_error: f64,
    pub probes: Vec<ProbeEstimate>,
}

/// Draws `samples` projections from `rule` at `x` and averages
/// `||P v||^2` for `probes` random unit tangent vectors `v` (Gaussian in an
/// orthonormal frame). All probes share the same draws.
pub fn estimate_randomized_constant(
    rule: &mut dyn SelectionRule,
    x: &Point,
    samples: usize,
    probes: usize,
    seed: u64,
) -> Result<RandomizedConstantEstimate> {
    if rule.kind() != RuleKind::Randomized {
        return Err(Error::InvalidArgument("constant estimation needs a randomized rule".into()));
    }
    if samples < 2 || probes == 0 {
        return Err(Error::InvalidArgument("need at least 2 samples and 1 probe".into()));
    }
    let mut rng = seeded_rng(seed);
    let dim = x.dimension();
    let mut directions = Vec::with_capacity(probes);
    while directions.len() < probes {
        let z: DVector<f64> = gaussian_vector(dim, &mut rng);
        let norm = z.norm();
        if norm < 1e-12 {
            continue;
        }
        directions.push(manifold::from_coordinates(x, &(z / norm))?);
    }
    let mut sums = vec![Neumaier::default(); probes];
    let mut squares = vec![Neumaier::default(); probes];
    for _ in 0..samples {
        let p = rule.select(x, x, 0)?;
        for (k, v) in directions.iter().enumerate() {
            let pv = p.apply(v)?;
            let q = manifold::metric(x, &pv, &pv)?;
            sums[k].add(q);
            squares[k].add(q * q);
        }
    }
    let ns = samples as f64;
    let estimates: Vec<ProbeEstimate> = directions
        .into_iter()
        .zip(sums.iter().zip(&squares))
        .map(|(direction, (s, sq))| {
            let mean = s.total() / ns;
            let var = ((sq.total() - ns * mean * mean) / (ns - 1.0)).max(0.0);
            ProbeEstimate {
                direction,
                mean,
                std_error: (var / ns).sqrt(),
            }
        })
        .collect();
    let best = estimates
        .iter()
        .min_by(|a, b| a.mean.total_cmp(&b.mean))
        .expect("at least one probe");
    Ok(RandomizedConstantEstimate {
        c2_hat: best.mean,
        c2_std_error: best.std_error,
        probes: estimates,
    })
}
