use crate::manifold::Point;

/// One inner step `y^{t,k-1} -> y^{t,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerRecord {
    /// Outer iteration `t` (1-based) the step belongs to.
    pub outer: usize,
    /// Position `k` (0-based) within the outer iteration.
    pub step: usize,
    /// Block index reported by the projection (the drawn outcome for
    /// randomized rules).
    pub block: usize,
    pub projected_grad_norm: f64,
    /// `step_length / projected_grad_norm`; equals `eta` for gradient steps.
    pub stepsize: f64,
    /// Length of the geodesic segment travelled, an upper bound on
    /// `d(y^{k-1}, y^k)`.
    pub step_length: f64,
    pub value_before: f64,
    pub value_after: f64,
    /// `L_k` used by the decrease monitor, if any.
    pub smoothness: Option<f64>,
    /// `f(y^{k-1}) - f(y^k) - ||P_k grad f||^2 / (2 L_k)` when `L_k` is known.
    pub decrease_residual: Option<f64>,
}

/// State after outer iteration `iteration` (0 is the initial point).
#[derive(Clone, Debug, PartialEq)]
pub struct OuterRecord {
    pub iteration: usize,
    pub value: f64,
    pub grad_norm: f64,
    /// Cumulative flop estimate up to and including this record.
    pub flops: u64,
    /// Inner steps taken since the previous record.
    pub inner: Vec<InnerRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    IterationCap,
    /// Backtracking underflowed and the configuration asked to stop.
    StepUnderflow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<OuterRecord>,
    pub termination: Termination,
    /// Number of inner steps per outer iteration.
    pub blocks_per_iteration: usize,
}

impl IterationTrace {
    /// Outer iterations completed.
    pub fn cycles(&self) -> usize {
        self.records.last().map_or(0, |r| r.iteration)
    }

    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.value)
    }

    pub fn final_grad_norm(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.grad_norm)
    }

    pub fn total_flops(&self) -> u64 {
        self.records.last().map_or(0, |r| r.flops)
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::GradientTolerance
    }

    /// All inner steps in order.
    pub fn inner_steps(&self) -> impl Iterator<Item = &InnerRecord> {
        self.records.iter().flat_map(|r| r.inner.iter())
    }

    /// Objective value at the latest record with `iteration <= cycle`.
    pub fn value_at_cycle(&self, cycle: usize) -> f64 {
        let idx = self.records.partition_point(|r| r.iteration <= cycle);
        self.records[idx.saturating_sub(1)].value
    }
}

/// Final iterate and trace of a run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub point: Point,
    pub trace: IterationTrace,
}
