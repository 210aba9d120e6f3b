//! Tangent subspace descent (TSD) for Riemannian optimization.
//!
//! TSD generalizes block coordinate descent to manifolds. At every outer
//! iteration a selection rule picks a sequence of subspaces of the tangent
//! space, and the iterate moves along the exponential map in the direction of
//! the projected Riemannian gradient:
//!
//! ```text
//! y^{t,0} = x^{t-1}
//! y^{t,k} = Exp(y^{t,k-1}, -eta_k P_k grad f(y^{t,k-1}))     k = 1..m
//! x^t     = y^{t,m}
//! ```
//!
//! The crate is split into
//!
//! * [`linalg`]: skew matrices, matrix exponential/logarithm, Givens kernels;
//! * [`manifold`]: points, tangent vectors and the Euclidean, orthogonal,
//!   Stiefel and product geometries;
//! * [`objective`]: the objective trait and two reference objectives;
//! * [`selection`]: subspace projections and selection rules;
//! * [`solver`]: the TSD double loop, step-size policies and a Riemannian
//!   gradient descent baseline;
//! * [`verify`]: numerical checks of the convergence theory (norm
//!   equivalence, gap condition, counterexamples, decrease audits).

pub mod error;
pub mod linalg;
pub mod manifold;
pub mod objective;
pub mod selection;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use manifold::{Ambient, Point, Tangent};
pub use objective::Objective;
