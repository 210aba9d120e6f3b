//! The TSD double loop, step-size policies and a Riemannian gradient descent
//! baseline.
//!
//! ```text
//! for t = 1, 2, ...
//!     y^0 = x^{t-1}
//!     for k = 1..m
//!         P_k = rule(y^0, y^{k-1}, k)
//!         y^k = Exp(y^{k-1}, -eta_k P_k grad f(y^{k-1}))
//!     x^t = y^m
//! ```
//!
//! `eta_k` is `1 / L_k` ([`StepsizePolicy::FixedInverseL`]), chosen by Armijo
//! backtracking ([`StepsizePolicy::Backtracking`]), or replaced by the exact
//! minimizer along each Givens pair for `f(Y) = Tr(D^T Y)`
//! ([`StepsizePolicy::ExactGivens`]).

pub mod flops;
mod linesearch;
mod trace;

pub use linesearch::{givens_exact_linesearch, pair_linesearch, PairLineSearch};
pub use trace::{InnerRecord, IterationTrace, OuterRecord, RunOutput, Termination};

use nalgebra::DMatrix;

use crate::linalg::{apply_givens_right, GivensCoefficients};
use crate::manifold::{self, exp, reorthonormalize, rgrad, Point, Tangent};
use crate::objective::Objective;
use crate::selection::{RuleKind, SelectionRule, SubspaceProjection};
use crate::{Error, Result};

/// Halvings tried by backtracking before giving up.
pub const MAX_HALVINGS: usize = 60;

/// Tolerance of the sufficient-decrease monitor.
pub const DECREASE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepsizePolicy {
    /// `eta_k = 1 / L_k` from the objective's block constants, falling back
    /// to its global constant.
    FixedInverseL,
    /// Armijo backtracking: accept the first `eta = eta0 shrink^j` with
    /// `f(y^k) <= f(y^{k-1}) - c eta ||P_k grad f||^2` and a strict decrease.
    Backtracking { c: f64, shrink: f64, eta0: f64 },
    /// Exact minimization along every pair of a Givens block; requires an
    /// objective exposing [`Objective::linear_trace`] on `O_n`.
    ExactGivens,
}

impl StepsizePolicy {
    /// `c = 1e-4`, `shrink = 0.5`, `eta0 = 1`.
    pub fn backtracking() -> Self {
        StepsizePolicy::Backtracking {
            c: 1e-4,
            shrink: 0.5,
            eta0: 1.0,
        }
    }
}

/// What to do when backtracking underflows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnderflowPolicy {
    /// Return [`Error::StepUnderflow`].
    Error,
    /// End the run with [`Termination::StepUnderflow`] and keep the trace.
    Stop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_outer_iterations: usize,
    pub gradient_tolerance: f64,
    pub policy: StepsizePolicy,
    /// Keep per-inner-step records.
    pub record_inner: bool,
    /// Fail with [`Error::DecreaseViolated`] when a fixed or exact step
    /// decreases `f` by less than `||P_k grad f||^2 / (2 L_k) - 1e-10`.
    pub monitor_decrease: bool,
    /// Outer iterations between gradient checks (and trace records).
    pub check_interval: usize,
    pub on_underflow: UnderflowPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer_iterations: 1000,
            gradient_tolerance: 1e-6,
            policy: StepsizePolicy::FixedInverseL,
            record_inner: true,
            monitor_decrease: true,
            check_interval: 1,
            on_underflow: UnderflowPolicy::Error,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.gradient_tolerance >= 0.0) {
            return Err(Error::InvalidArgument("gradient tolerance must be >= 0".into()));
        }
        if self.check_interval == 0 {
            return Err(Error::InvalidArgument("check interval must be >= 1".into()));
        }
        if let StepsizePolicy::Backtracking { c, shrink, eta0 } = self.policy {
            if !(c > 0.0 && c < 1.0 && shrink > 0.0 && shrink < 1.0 && eta0 > 0.0 && eta0.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "backtracking needs 0 < c < 1, 0 < shrink < 1, eta0 > 0 (got {c}, {shrink}, {eta0})"
                )));
            }
        }
        Ok(())
    }
}

/// Result of a single inner step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub point: Point,
    pub stepsize: f64,
    pub projected_grad_norm: f64,
    pub step_length: f64,
    pub value_before: f64,
    pub value_after: f64,
    pub flops: u64,
}

fn check_base(y: &Point, p: &SubspaceProjection) -> Result<()> {
    if p.base().same_as(y) {
        Ok(())
    } else {
        Err(Error::BaseMismatch("projection is not based at the current iterate".into()))
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite)
    }
}

/// `Exp_y(-eta d)` for `d` in the range of `p`, using plane rotations when
/// `p` is a Givens block with disjoint pairs.
fn move_along(y: &Point, p: &SubspaceProjection, d: &Tangent, eta: f64) -> Result<(Point, u64)> {
    if let (Some(pairs), Point::Orthogonal(ym), Tangent::Orthogonal(a)) = (p.disjoint_pairs(), y, d) {
        let n = ym.nrows();
        let entries = pairs.iter().map(|&(i, j)| (i, j, -eta * a.get(i, j))).collect();
        let g = GivensCoefficients::new(n, entries)?;
        let mut z = ym.clone();
        apply_givens_right(&mut z, &g)?;
        return Ok((Point::Orthogonal(z), flops::givens_pair_update(n) * pairs.len() as u64));
    }
    Ok((exp(y, &d.scale(-eta))?, flops::exp(y)))
}

fn projected_gradient(obj: &dyn Objective, y: &Point, p: &SubspaceProjection) -> Result<(Tangent, f64, u64)> {
    let g = rgrad(obj, y)?;
    let pg = p.apply(&g)?;
    let norm = manifold::norm(y, &pg)?;
    Ok((pg, finite(norm)?, flops::rgrad(y)))
}

/// `y^k = Exp(y^{k-1}, -(1/L_k) P_k grad f(y^{k-1}))`.
pub fn step_fixed(obj: &dyn Objective, y: &Point, p: &SubspaceProjection, l_k: f64) -> Result<StepOutcome> {
    check_base(y, p)?;
    if !(l_k > 0.0 && l_k.is_finite()) {
        return Err(Error::InvalidArgument(format!("smoothness constant {l_k} must be positive")));
    }
    let value_before = finite(obj.value(y)?)?;
    step_fixed_from(obj, y, p, l_k, value_before)
}

fn step_fixed_from(
    obj: &dyn Objective,
    y: &Point,
    p: &SubspaceProjection,
    l_k: f64,
    value_before: f64,
) -> Result<StepOutcome> {
    let (pg, pn, mut cost) = projected_gradient(obj, y, p)?;
    let eta = 1.0 / l_k;
    let (point, c) = move_along(y, p, &pg, eta)?;
    cost += c + flops::value(y);
    let value_after = finite(obj.value(&point)?)?;
    Ok(StepOutcome {
        point,
        stepsize: eta,
        projected_grad_norm: pn,
        step_length: eta * pn,
        value_before,
        value_after,
        flops: cost,
    })
}

/// Armijo backtracking along `-P_k grad f`. Fails with
/// [`Error::StepUnderflow`] after [`MAX_HALVINGS`] halvings.
pub fn step_backtracking(
    obj: &dyn Objective,
    y: &Point,
    p: &SubspaceProjection,
    c: f64,
    shrink: f64,
    eta0: f64,
) -> Result<StepOutcome> {
    check_base(y, p)?;
    let value_before = finite(obj.value(y)?)?;
    step_backtracking_from(obj, y, p, c, shrink, eta0, value_before)
}

fn step_backtracking_from(
    obj: &dyn Objective,
    y: &Point,
    p: &SubspaceProjection,
    c: f64,
    shrink: f64,
    eta0: f64,
    value_before: f64,
) -> Result<StepOutcome> {
    let (pg, pn, mut cost) = projected_gradient(obj, y, p)?;
    let pn2 = pn * pn;
    if pn2 == 0.0 {
        return Ok(StepOutcome {
            point: y.clone(),
            stepsize: eta0,
            projected_grad_norm: 0.0,
            step_length: 0.0,
            value_before,
            value_after: value_before,
            flops: cost,
        });
    }
    let mut eta = eta0;
    for _ in 0..=MAX_HALVINGS {
        let (trial, move_cost) = move_along(y, p, &pg, eta)?;
        cost += move_cost + flops::value(y);
        let value = obj.value(&trial)?;
        if value.is_finite() && value <= value_before - c * eta * pn2 && value < value_before {
            return Ok(StepOutcome {
                point: trial,
                stepsize: eta,
                projected_grad_norm: pn,
                step_length: eta * pn,
                value_before,
                value_after: value,
                flops: cost,
            });
        }
        eta *= shrink;
    }
    Err(Error::StepUnderflow {
        halvings: MAX_HALVINGS,
    })
}

/// Exact per-pair minimization of `Tr(D^T Y)` over a block of disjoint pairs,
/// in place. Each pair needs four inner products of columns, so a block of
/// `s` pairs costs `O(s n)`.
fn step_exact_givens(
    d: &DMatrix<f64>,
    y: &mut DMatrix<f64>,
    pairs: &[(usize, usize)],
    value_before: f64,
) -> Result<(f64, f64, f64, u64)> {
    let n = y.nrows();
    let mut entries = Vec::with_capacity(pairs.len());
    let mut grad_sq = 0.0;
    let mut length_sq = 0.0;
    let mut decrease = 0.0;
    for &(i, j) in pairs {
        let g_ii = d.column(i).dot(&y.column(i));
        let g_jj = d.column(j).dot(&y.column(j));
        let g_ij = d.column(i).dot(&y.column(j));
        let g_ji = d.column(j).dot(&y.column(i));
        // Riemannian gradient coefficient a_ij = (g_ji - g_ij) / 2, ||a H_ij||^2 = 2 a^2.
        let a = 0.5 * (g_ji - g_ij);
        grad_sq += 2.0 * a * a;
        let ls = pair_linesearch(0.0, g_ii, g_jj, g_ij, g_ji);
        let angle = ls.angle();
        decrease += g_ii + g_jj - ls.value;
        length_sq += 2.0 * angle * angle;
        entries.push((i, j, angle));
    }
    let g = GivensCoefficients::new(n, entries)?;
    apply_givens_right(y, &g)?;
    let cost = pairs.len() as u64 * (4 * flops::dot(n) + flops::givens_pair_update(n));
    Ok((grad_sq.sqrt(), length_sq.sqrt(), value_before - decrease, cost))
}

fn smoothness_for(obj: &dyn Objective, block: usize) -> Option<f64> {
    obj.block_constants()
        .and_then(|b| b.get(block).copied())
        .or_else(|| obj.smoothness())
}

/// Runs TSD from `x0` with the given selection rule.
pub fn tsd_run(
    obj: &dyn Objective,
    x0: &Point,
    rule: &mut dyn SelectionRule,
    config: &SolverConfig,
) -> Result<RunOutput> {
    config.validate()?;
    let m = rule.blocks_per_iteration();
    if m == 0 {
        return Err(Error::InvalidArgument("selection rule has no blocks".into()));
    }
    if rule.kind() == RuleKind::Randomized && m != 1 {
        return Err(Error::InvalidArgument("randomized rules take one step per iteration".into()));
    }
    let exact_d = match config.policy {
        StepsizePolicy::ExactGivens => match (obj.linear_trace(), x0) {
            (Some(d), Point::Orthogonal(y)) if d.shape() == y.shape() => Some(d),
            _ => {
                return Err(Error::InvalidArgument(
                    "exact Givens line search needs Tr(D^T Y) on O_n".into(),
                ))
            }
        },
        _ => None,
    };

    let mut x = x0.clone();
    let mut records = Vec::new();
    let mut pending: Vec<InnerRecord> = Vec::new();
    let mut flop_count: u64 = 0;
    let mut termination = Termination::IterationCap;
    let mut t = 0;
    loop {
        let is_last = t == config.max_outer_iterations;
        if t % config.check_interval == 0 || is_last {
            let value = finite(obj.value(&x)?)?;
            let grad_norm = finite(manifold::norm(&x, &rgrad(obj, &x)?)?)?;
            flop_count += flops::value(&x) + flops::rgrad(&x);
            records.push(OuterRecord {
                iteration: t,
                value,
                grad_norm,
                flops: flop_count,
                inner: std::mem::take(&mut pending),
            });
            if grad_norm <= config.gradient_tolerance {
                termination = Termination::GradientTolerance;
                break;
            }
        }
        if is_last {
            break;
        }
        t += 1;

        let anchor = x.clone();
        let mut y = x;
        let mut value = finite(obj.value(&y)?)?;
        flop_count += flops::value(&y);
        let mut stopped = false;
        for k in 0..m {
            let p = rule.select(&anchor, &y, k)?;
            check_base(&y, &p)?;
            let block = p.block().unwrap_or(k);
            let l_k = smoothness_for(obj, block);
            let outcome = match (config.policy, exact_d) {
                (StepsizePolicy::ExactGivens, Some(d)) => {
                    let pairs = p.disjoint_pairs().ok_or_else(|| {
                        Error::InvalidArgument(
                            "exact Givens line search needs a block of disjoint pairs".into(),
                        )
                    })?;
                    let Point::Orthogonal(mut ym) = y else {
                        unreachable!("checked before the loop")
                    };
                    let (pn, length, after, cost) = step_exact_givens(d, &mut ym, pairs, value)?;
                    StepOutcome {
                        point: Point::Orthogonal(ym),
                        stepsize: if pn > 0.0 { length / pn } else { 0.0 },
                        projected_grad_norm: pn,
                        step_length: length,
                        value_before: value,
                        value_after: after,
                        flops: cost,
                    }
                }
                (StepsizePolicy::FixedInverseL, _) => {
                    let l = l_k.ok_or(Error::MissingSmoothness(block))?;
                    step_fixed_from(obj, &y, &p, l, value)?
                }
                (StepsizePolicy::Backtracking { c, shrink, eta0 }, _) => {
                    match step_backtracking_from(obj, &y, &p, c, shrink, eta0, value) {
                        Ok(o) => o,
                        Err(Error::StepUnderflow { .. }) if config.on_underflow == UnderflowPolicy::Stop => {
                            stopped = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                (StepsizePolicy::ExactGivens, None) => unreachable!("checked before the loop"),
            };
            let monitored = !matches!(config.policy, StepsizePolicy::Backtracking { .. });
            let residual = l_k.map(|l| {
                outcome.value_before
                    - outcome.value_after
                    - outcome.projected_grad_norm.powi(2) / (2.0 * l)
            });
            if let (true, true, Some(r)) = (config.monitor_decrease, monitored, residual) {
                if r < -DECREASE_TOL {
                    return Err(Error::DecreaseViolated {
                        outer: t,
                        inner: k,
                        residual: r,
                    });
                }
            }
            flop_count += outcome.flops;
            if config.record_inner {
                pending.push(InnerRecord {
                    outer: t,
                    step: k,
                    block,
                    projected_grad_norm: outcome.projected_grad_norm,
                    stepsize: outcome.stepsize,
                    step_length: outcome.step_length,
                    value_before: outcome.value_before,
                    value_after: outcome.value_after,
                    smoothness: l_k,
                    decrease_residual: residual,
                });
            }
            value = outcome.value_after;
            y = outcome.point;
        }
        reorthonormalize(&mut y);
        x = y;
        if stopped {
            let value = finite(obj.value(&x)?)?;
            let grad_norm = finite(manifold::norm(&x, &rgrad(obj, &x)?)?)?;
            records.push(OuterRecord {
                iteration: t,
                value,
                grad_norm,
                flops: flop_count,
                inner: std::mem::take(&mut pending),
            });
            termination = Termination::StepUnderflow;
            break;
        }
    }
    Ok(RunOutput {
        point: x,
        trace: IterationTrace {
            records,
            termination,
            blocks_per_iteration: m,
        },
    })
}

/// The whole tangent space as a single block.
struct FullSpace;

impl SelectionRule for FullSpace {
    fn kind(&self) -> RuleKind {
        RuleKind::Deterministic
    }

    fn blocks_per_iteration(&self) -> usize {
        1
    }

    fn select(&mut self, _anchor: &Point, current: &Point, _k: usize) -> Result<SubspaceProjection> {
        Ok(SubspaceProjection::identity(current.clone()).with_block(0))
    }
}

/// Riemannian gradient descent, `x^t = Exp(x^{t-1}, -eta_t grad f(x^{t-1}))`:
/// TSD with the identity as its only projection. Accepts the fixed and
/// backtracking policies.
pub fn rgd_run(obj: &dyn Objective, x0: &Point, config: &SolverConfig) -> Result<RunOutput> {
    if config.policy == StepsizePolicy::ExactGivens {
        return Err(Error::InvalidArgument(
            "gradient descent uses fixed or backtracking step sizes".into(),
        ));
    }
    tsd_run(obj, x0, &mut FullSpace, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;
    use crate::objective::{LinearTrace, Quadratic};
    use crate::selection::{GivensPartition, GivensRule, ProductRule};
    use nalgebra::DVector;

    #[test]
    fn stationary_start_takes_no_steps() {
        let q = DMatrix::identity(3, 3);
        let f = Quadratic::new(q, DVector::zeros(3)).unwrap();
        let x0 = Point::Euclidean(DVector::zeros(3));
        let out = rgd_run(&f, &x0, &SolverConfig::default()).unwrap();
        assert_eq!(out.trace.records.len(), 1);
        assert_eq!(out.trace.inner_steps().count(), 0);
        assert_eq!(out.point, x0);
        assert!(out.trace.converged());
    }

    #[test]
    fn wrong_gradient_sign_underflows() {
        struct Flipped(Quadratic);
        impl Objective for Flipped {
            fn value(&self, x: &Point) -> Result<f64> {
                self.0.value(x)
            }
            fn euclidean_gradient(&self, x: &Point) -> Result<crate::Ambient> {
                match self.0.euclidean_gradient(x)? {
                    crate::Ambient::Vector(g) => Ok(crate::Ambient::Vector(-g)),
                    _ => unreachable!(),
                }
            }
        }
        let f = Flipped(Quadratic::new(DMatrix::identity(3, 3), DVector::zeros(3)).unwrap());
        let x = Point::Euclidean(DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let p = SubspaceProjection::identity(x.clone());
        assert_eq!(
            step_backtracking(&f, &x, &p, 1e-4, 0.5, 1.0).unwrap_err(),
            Error::StepUnderflow { halvings: 60 }
        );
        let config = SolverConfig {
            policy: StepsizePolicy::backtracking(),
            on_underflow: UnderflowPolicy::Stop,
            ..SolverConfig::default()
        };
        let out = rgd_run(&f, &x, &config).unwrap();
        assert_eq!(out.trace.termination, Termination::StepUnderflow);
    }

    #[test]
    fn fixed_policy_needs_constants() {
        struct NoConstants;
        impl Objective for NoConstants {
            fn value(&self, _: &Point) -> Result<f64> {
                Ok(1.0)
            }
            fn euclidean_gradient(&self, x: &Point) -> Result<crate::Ambient> {
                Ok(crate::Ambient::Vector(DVector::from_element(x.dimension(), 1.0)))
            }
        }
        let x = Point::Euclidean(DVector::zeros(2));
        assert_eq!(
            rgd_run(&NoConstants, &x, &SolverConfig::default()).unwrap_err(),
            Error::MissingSmoothness(0)
        );
    }

    #[test]
    fn exact_givens_sweeps_reach_the_optimum_on_small_instance() {
        let d = -random_orthogonal(4, 7);
        let f = LinearTrace::new(d);
        let mut rule = GivensRule::new(GivensPartition::singleton(4)).unwrap();
        let config = SolverConfig {
            policy: StepsizePolicy::ExactGivens,
            max_outer_iterations: 200,
            gradient_tolerance: 1e-10,
            ..SolverConfig::default()
        };
        let x0 = Point::Orthogonal(DMatrix::identity(4, 4));
        let out = tsd_run(&f, &x0, &mut rule, &config).unwrap();
        // Optimum of Tr(D^T Y) with D = -Q is Y = Q, value -n.
        assert!((out.trace.final_value() + 4.0).abs() < 1e-9, "{}", out.trace.final_value());
    }

    #[test]
    fn exact_policy_rejects_non_linear_objective() {
        let f = Quadratic::new(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        let x0 = Point::Product(vec![
            Point::Euclidean(DVector::zeros(1)),
            Point::Euclidean(DVector::zeros(1)),
        ]);
        let config = SolverConfig {
            policy: StepsizePolicy::ExactGivens,
            ..SolverConfig::default()
        };
        assert!(tsd_run(&f, &x0, &mut ProductRule::new(2), &config).is_err());
    }

    #[test]
    fn trace_value_lookup_by_cycle() {
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 10.0]));
        let f = Quadratic::new(q, DVector::zeros(2)).unwrap();
        let x0 = Point::Euclidean(DVector::from_vec(vec![1.0, 1.0]));
        let config = SolverConfig {
            max_outer_iterations: 5,
            ..SolverConfig::default()
        };
        let out = rgd_run(&f, &x0, &config).unwrap();
        assert_eq!(out.trace.cycles(), 5);
        assert_eq!(out.trace.value_at_cycle(2), out.trace.records[2].value);
        assert_eq!(out.trace.value_at_cycle(99), out.trace.final_value());
    }
}
