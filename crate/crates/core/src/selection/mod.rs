//! Subspace projections and the rules that choose them.
//!
//! A deterministic rule supplies `m` projections per outer iteration whose
//! ranges jointly span the tangent space; a randomized rule draws a single
//! projection per outer iteration with `E[P] >= C^2 I` in the sense
//!
//! ```text
//! E ||P v||^2 >= C^2 ||v||^2        for all tangent v.
//! ```

mod partition;
mod projection;
mod rules;

pub use partition::GivensPartition;
pub use projection::{conjugated_projection, ProjectionKind, SubspaceProjection};
pub use rules::{
    check_decomposition, range_coordinates, singleton_givens_decomposition,
    validate_probabilities, DecompositionFactory, GivensRule, ParallelTransportRule, ProductRule,
    RandomizedFiniteRule, RandomizedOrthogonalRule, RandomizedStiefelRule, RuleKind,
    SelectionRule, StiefelOutcome,
};
