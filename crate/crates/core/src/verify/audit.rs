//! Audit of recorded traces against the sufficient-decrease inequalities.
//!
//! Per inner step, with `L_k` the recorded smoothness constant:
//!
//! ```text
//! f(y^{k-1}) - f(y^k) >= ||P_k grad f(y^{k-1})||^2 / (2 L_k)
//! ```
//!
//! Per outer iteration, under a `(gamma, r)` gap with `sqrt(m) gamma < 1`
//! and fixed steps `1 / L_k`:
//!
//! ```text
//! sum_k d(y^{k-1}, y^k) <= r:  f(y^0) - f(y^m) >= eta  ||grad f(y^0)||^2
//! otherwise:                   f(y^0) - f(y^m) >= eta'
//!
//! eta  = L_min^2 (1 - sqrt(m) gamma)^2 / (4 L_max (L_min^2 + L_f^2 (m - 1) m))
//! eta' = L_min r^2 / (2 m)
//! ```
//!
//! The regime is classified by the summed step lengths, which bound the
//! summed distances from above; both bounds follow for that classification.

use crate::solver::IterationTrace;
use crate::{Error, Result};

/// Slack on every audited inequality.
pub const AUDIT_TOL: f64 = 1e-9;

/// Relative tolerance for recognising a `1 / L_k` step.
const FIXED_STEP_RTOL: f64 = 1e-9;

/// Gap parameters enabling the small/large-step check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapConstants {
    pub gamma: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConstants {
    /// `L_f`.
    pub smoothness: f64,
    /// `L_1, ..., L_m`; only their extremes enter the bounds.
    pub block_constants: Vec<f64>,
    pub gap: Option<GapConstants>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRegime {
    Small,
    Large,
    /// Steps were not `1 / L_k`, or the previous gradient norm is not
    /// recorded.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationAudit {
    pub iteration: usize,
    pub decrease: f64,
    /// `decrease - sum_k ||P_k grad f||^2 / (2 L_k)`.
    pub template_residual: f64,
    /// Smallest per-step residual, recomputed from the recorded values.
    pub min_step_residual: f64,
    pub path_length: f64,
    pub regime: StepRegime,
    /// `decrease - bound` for the regime, when checked.
    pub regime_residual: Option<f64>,
    /// Recorded values agree between consecutive steps and records.
    pub consistent: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub iterations: Vec<IterationAudit>,
    pub eta_small: Option<f64>,
    pub eta_large: Option<f64>,
    /// `sqrt(m) gamma >= 1`: the small-step bound is not checked.
    pub vacuous_small_step: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.iterations.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> usize {
        self.iterations.iter().filter(|i| !i.passed).count()
    }

    pub fn min_step_residual(&self) -> f64 {
        self.iterations
            .iter()
            .map(|i| i.min_step_residual)
            .fold(f64::INFINITY, f64::min)
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Audits every recorded outer iteration of `trace`.
pub fn decrease_audit(trace: &IterationTrace, constants: &AuditConstants) -> Result<AuditReport> {
    let lf = constants.smoothness;
    let l_min = constants.block_constants.iter().copied().fold(f64::INFINITY, f64::min);
    let l_max = constants.block_constants.iter().copied().fold(0.0, f64::max);
    if !(lf > 0.0) || constants.block_constants.is_empty() || !(l_min > 0.0) {
        return Err(Error::InvalidArgument("positive smoothness constants required".into()));
    }
    let m = trace.blocks_per_iteration.max(1) as f64;
    let (eta_small, eta_large, vacuous) = match constants.gap {
        Some(g) => {
            let q = 1.0 - m.sqrt() * g.gamma;
            let eta = l_min * l_min * q * q / (4.0 * l_max * (l_min * l_min + lf * lf * (m - 1.0) * m));
            (Some(eta), Some(l_min * g.radius * g.radius / (2.0 * m)), q <= 0.0)
        }
        None => (None, None, false),
    };

    let mut iterations = Vec::new();
    for pair in trace.records.windows(2) {
        let (prev, rec) = (&pair[0], &pair[1]);
        let mut consistent = true;
        let mut expected_before = prev.value;
        let mut template = 0.0;
        let mut min_step = f64::INFINITY;
        let mut path = 0.0;
        let mut fixed = true;
        for step in &rec.inner {
            let l_k = step.smoothness.ok_or(Error::MissingSmoothness(step.block))?;
            consistent &= same(step.value_before, expected_before);
            expected_before = step.value_after;
            let g2 = step.projected_grad_norm * step.projected_grad_norm;
            let want = g2 / (2.0 * l_k);
            template += want;
            min_step = min_step.min(step.value_before - step.value_after - want);
            path += step.step_length;
            fixed &= g2 == 0.0 || (step.stepsize * l_k - 1.0).abs() <= FIXED_STEP_RTOL;
        }
        if !rec.inner.is_empty() {
            consistent &= same(rec.value, expected_before);
        }
        let decrease = prev.value - rec.value;
        let template_residual = decrease - template;
        let consecutive = rec.iteration == prev.iteration + 1;
        let (regime, regime_residual) = match (eta_small, eta_large) {
            (Some(es), Some(el)) if fixed && consecutive && !rec.inner.is_empty() => {
                let r = constants.gap.map_or(0.0, |g| g.radius);
                if path <= r {
                    let residual = (!vacuous).then(|| decrease - es * prev.grad_norm * prev.grad_norm);
                    (StepRegime::Small, residual)
                } else {
                    (StepRegime::Large, Some(decrease - el))
                }
            }
            _ => (StepRegime::NotApplicable, None),
        };
        let min_step_residual = if rec.inner.is_empty() { 0.0 } else { min_step };
        let passed = consistent
            && min_step_residual >= -AUDIT_TOL
            && template_residual >= -AUDIT_TOL
            && regime_residual.is_none_or(|r| r >= -AUDIT_TOL);
        iterations.push(IterationAudit {
            iteration: rec.iteration,
            decrease,
            template_residual,
            min_step_residual,
            path_length: path,
            regime,
            regime_residual,
            consistent,
            passed,
        });
    }
    Ok(AuditReport {
        iterations,
        eta_small,
        eta_large,
        vacuous_small_step: vacuous,
    })
}
