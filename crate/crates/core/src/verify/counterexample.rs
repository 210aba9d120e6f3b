//! Counterexamples showing that norm equivalence can degrade along the
//! iterates when the decomposition is re-chosen at every outer iteration.
//!
//! Both run on `f(x) = ||x||^2 / 2` in `R^n` with `epsilon = f(x^0) / 2`.
//! A unit vector `v` with `<v, x> = s` gives, with step size 1,
//! `x - s v` and `f(x - s v) = f(x) - s^2 / 2`.
//!
//! * Randomized: `s = sqrt(f(x^{t-1}) - epsilon)`, so `f(x^t) - epsilon`
//!   halves each iteration and `f(x^t) = epsilon (1 + 2^{-t})`.
//! * Deterministic (`m = n` steps): `s = sqrt((f(x^{t-1}) - epsilon) / m)` at
//!   every inner step, so `f(y^{t,k}) = ((2m - k) f(x^{t-1}) + k epsilon) / (2m)`.
//!
//! In both cases the admissible directions concentrate near `x^perp` as
//! `s / ||x|| -> 0`, and the norm-equivalence ratio grows without bound.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::norms::{norm_equiv_ratio, weighted_norm_equiv_ratio, NormEquivalenceReport, NormEquivalenceRow};
use crate::linalg::{orth_complement_basis, seeded_rng};
use crate::manifold::{Point, Tangent};
use crate::selection::SubspaceProjection;
use crate::solver::{InnerRecord, IterationTrace, OuterRecord, Termination};
use crate::{Error, Result};

/// Largest supported number of outer iterations.
pub const MAX_ITERATIONS: usize = 50;

#[derive(Clone, Debug)]
pub struct CounterexampleRun {
    pub trace: IterationTrace,
    pub report: NormEquivalenceReport,
    pub epsilon: f64,
    /// `max_t |f(x^t) - epsilon (1 + 2^{-t})|`.
    pub max_value_deviation: f64,
    /// Deterministic construction only:
    /// `max_{t,k} |f(y^{t,k}) - ((2m - k) f(x^{t-1}) + k epsilon) / (2m)|`.
    pub max_inner_deviation: f64,
}

fn half_sq(x: &DVector<f64>) -> f64 {
    0.5 * x.norm_squared()
}

fn validate(n: usize, x0: &DVector<f64>, iterations: usize) -> Result<()> {
    if n < 2 || x0.len() != n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 and x0 in R^n (n = {n}, len = {})",
            x0.len()
        )));
    }
    if iterations > MAX_ITERATIONS {
        return Err(Error::InvalidArgument(format!(
            "at most {MAX_ITERATIONS} iterations supported (requested {iterations})"
        )));
    }
    if !(x0.norm() > 0.0) || !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("x0 must be finite and nonzero".into()));
    }
    Ok(())
}

/// Unit vectors `alpha x_hat +- sqrt(1 - alpha^2) u` built from an
/// orthonormal basis `{u_i}` of `x_hat^perp`.
fn slice_frame(x: &DVector<f64>, s: f64) -> Result<(f64, DVector<f64>, DMatrix<f64>)> {
    let norm = x.norm();
    let alpha = s / norm;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("slice parameter {alpha} outside [0, 1]")));
    }
    let x_hat = x / norm;
    let frame = DMatrix::from_column_slice(x.len(), 1, x_hat.as_slice());
    let u = orth_complement_basis(&frame)?;
    Ok((alpha, x_hat, u))
}

fn rank_one(base: &DVector<f64>, v: &DVector<f64>) -> Result<SubspaceProjection> {
    SubspaceProjection::onto_span(Point::Euclidean(base.clone()), &[Tangent::Euclidean(v.clone())])
}

fn record(iteration: usize, x: &DVector<f64>, inner: Vec<InnerRecord>) -> OuterRecord {
    OuterRecord {
        iteration,
        value: half_sq(x),
        grad_norm: x.norm(),
        flops: 0,
        inner,
    }
}

fn step_record(outer: usize, step: usize, block: usize, s: f64, before: f64, after: f64) -> InnerRecord {
    InnerRecord {
        outer,
        step,
        block,
        projected_grad_norm: s.abs(),
        stepsize: 1.0,
        step_length: s.abs(),
        value_before: before,
        value_after: after,
        smoothness: Some(1.0),
        decrease_residual: Some(before - after - 0.5 * s * s),
    }
}

/// Randomized construction: at `x^{t-1}` the decomposition is
/// `v_i = alpha x_hat + beta u_i` (`i < n`) and
/// `v_n = alpha x_hat - beta u_1`, each drawn with probability `1/n`, where
/// `alpha = sqrt(f - epsilon) / ||x||` and `beta = sqrt(1 - alpha^2)`.
pub fn counterexample_randomized(
    n: usize,
    x0: &DVector<f64>,
    iterations: usize,
    seed: u64,
) -> Result<CounterexampleRun> {
    validate(n, x0, iterations)?;
    let mut rng = seeded_rng(seed);
    let epsilon = half_sq(x0) / 2.0;
    let mut x = x0.clone();
    let mut records = vec![record(0, &x, Vec::new())];
    let mut report = NormEquivalenceReport::default();
    let mut max_dev: f64 = 0.0;
    let weights = vec![1.0 / n as f64; n];
    for t in 1..=iterations {
        let f = half_sq(&x);
        let s = (f - epsilon).max(0.0).sqrt();
        let (alpha, x_hat, u) = slice_frame(&x, s)?;
        let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
        let mut dirs: Vec<DVector<f64>> = (0..n - 1).map(|i| &x_hat * alpha + u.column(i) * beta).collect();
        dirs.push(&x_hat * alpha - u.column(0) * beta);

        let projections = dirs.iter().map(|v| rank_one(&x, v)).collect::<Result<Vec<_>>>()?;
        let (sigma_min, ratio) = weighted_norm_equiv_ratio(&projections, &weights)?;
        report.rows.push(NormEquivalenceRow {
            iteration: t,
            sigma_min,
            ratio,
        });

        let pick = rng.random_range(0..n);
        let v = &dirs[pick];
        let coef = v.dot(&x);
        let next = &x - v * coef;
        let inner = vec![step_record(t, 0, pick, coef, f, half_sq(&next))];
        x = next;
        max_dev = max_dev.max((half_sq(&x) - epsilon * (1.0 + 0.5f64.powi(t as i32))).abs());
        records.push(record(t, &x, inner));
    }
    Ok(CounterexampleRun {
        trace: IterationTrace {
            records,
            termination: Termination::IterationCap,
            blocks_per_iteration: 1,
        },
        report,
        epsilon,
        max_value_deviation: max_dev,
        max_inner_deviation: 0.0,
    })
}

/// Deterministic construction with `m = n` inner steps. At `y^{k-1}` every
/// unit `v` with `<v, y^{k-1}> = sqrt((f(x^{t-1}) - epsilon) / m)` is
/// admissible; among the candidates `alpha y_hat +- beta u_i` the one with the
/// largest component outside the span of the earlier picks is taken, so the
/// `m` directions span `R^n`.
pub fn counterexample_deterministic(n: usize, x0: &DVector<f64>, iterations: usize) -> Result<CounterexampleRun> {
    validate(n, x0, iterations)?;
    let m = n;
    let epsilon = half_sq(x0) / 2.0;
    let mut x = x0.clone();
    let mut records = vec![record(0, &x, Vec::new())];
    let mut report = NormEquivalenceReport::default();
    let mut max_dev: f64 = 0.0;
    let mut max_inner: f64 = 0.0;
    for t in 1..=iterations {
        let fx = half_sq(&x);
        let s = ((fx - epsilon) / m as f64).max(0.0).sqrt();
        let mut y = x.clone();
        let mut picked: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut orthonormal: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut inner = Vec::with_capacity(m);
        for k in 1..=m {
            let (alpha, y_hat, u) = slice_frame(&y, s)?;
            let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
            let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
            for i in 0..n - 1 {
                for sign in [1.0, -1.0] {
                    let v = &y_hat * alpha + u.column(i) * (sign * beta);
                    let mut r = v.clone();
                    for q in &orthonormal {
                        r -= q * q.dot(&r);
                    }
                    let res = r.norm();
                    if best.as_ref().is_none_or(|(b, _, _)| res > *b) {
                        best = Some((res, v, r));
                    }
                }
            }
            let (res, v, r) = best.expect("n >= 2 gives candidates");
            if res > SPAN_RESIDUAL {
                orthonormal.push(r / res);
            }
            let before = half_sq(&y);
            let coef = v.dot(&y);
            y -= &v * coef;
            let after = half_sq(&y);
            let want = ((2 * m - k) as f64 * fx + k as f64 * epsilon) / (2 * m) as f64;
            max_inner = max_inner.max((after - want).abs());
            inner.push(step_record(t, k - 1, k - 1, coef, before, after));
            picked.push(v);
        }
        let projections = picked.iter().map(|v| rank_one(&x, v)).collect::<Result<Vec<_>>>()?;
        let (sigma_min, ratio) = norm_equiv_ratio(&projections)?;
        report.rows.push(NormEquivalenceRow {
            iteration: t,
            sigma_min,
            ratio,
        });
        x = y;
        max_dev = max_dev.max((half_sq(&x) - epsilon * (1.0 + 0.5f64.powi(t as i32))).abs());
        records.push(record(t, &x, inner));
    }
    Ok(CounterexampleRun {
        trace: IterationTrace {
            records,
            termination: Termination::IterationCap,
            blocks_per_iteration: m,
        },
        report,
        epsilon,
        max_value_deviation: max_dev,
        max_inner_deviation: max_inner,
    })
}

const SPAN_RESIDUAL: f64 = 1e-14;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_long_horizons_and_bad_start() {
        let x0 = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(counterexample_randomized(3, &x0, 51, 0).is_err());
        assert!(counterexample_deterministic(3, &DVector::zeros(3), 5).is_err());
        assert!(counterexample_deterministic(4, &x0, 5).is_err());
    }

    #[test]
    fn values_follow_the_halving_identity() {
        let x0 = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let r = counterexample_randomized(3, &x0, 20, 1).unwrap();
        assert!(r.max_value_deviation < 1e-12);
        let d = counterexample_deterministic(3, &x0, 20).unwrap();
        assert!(d.max_value_deviation < 1e-12);
        assert!(d.max_inner_deviation < 1e-12);
        assert!(d.report.all_spanning());
    }

    #[test]
    fn randomized_ratio_closed_form_at_first_iteration() {
        // alpha = sqrt(f - eps) / ||x|| = 1/2 at t = 1; sigma_min(V) follows
        // from the rows (alpha, beta e_i), (alpha, -beta e_1).
        let x0 = DVector::from_vec(vec![0.0, 3.0]);
        let r = counterexample_randomized(2, &x0, 1, 0).unwrap();
        let alpha: f64 = 0.5;
        let beta = (1.0 - alpha * alpha).sqrt();
        let v = DMatrix::from_row_slice(2, 2, &[alpha, beta, alpha, -beta]);
        let sigma = v.singular_values().min();
        let want = 2f64.sqrt() / sigma;
        assert!((r.report.rows[0].ratio - want).abs() < 1e-12);
    }
}
