//! Numerical checks of the convergence theory: seminorms and
//! norm-equivalence ratios, the counterexamples where re-chosen
//! decompositions degrade, gap-ensuring checks for the Givens rule, the
//! transport construction that collapses the span, Monte Carlo estimates of
//! the randomized constant, and audits of recorded traces.
//!
//! For projections `P_1, ..., P_m` at `y`:
//!
//! ```text
//! ||v||_P = sqrt(sum_k ||P_k v||^2)
//! ratio   = sup_v ||v|| / ||v||_P = 1 / sigma_min([P_1; ...; P_m])
//! ```
//!
//! in an orthonormal frame of `T_y M`. The ratio is `+inf` when the ranges do
//! not span (`sigma_min < 1e-12`).

pub mod audit;
pub mod counterexample;
pub mod gap;
pub mod norms;
pub mod randomized;
pub mod suite;

pub use audit::{decrease_audit, AuditConstants, AuditReport, GapConstants, IterationAudit, StepRegime, AUDIT_TOL};
pub use counterexample::{counterexample_deterministic, counterexample_randomized, CounterexampleRun};
pub use gap::{
    adversarial_collapse, adversarial_displacement, check_gap_orthogonal, gap_gamma, gap_radius, AdversarialReport,
    BlockGap, GapReport,
};
pub use norms::{
    norm_equiv_ratio, seminorm, weighted_norm_equiv_ratio, NormEquivalenceReport, NormEquivalenceRow, SPAN_TOL,
};
pub use randomized::{estimate_randomized_constant, ProbeEstimate, RandomizedConstantEstimate};
pub use suite::{run_all, CheckOutcome};
