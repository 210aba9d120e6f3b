//! Procrustes benchmark harness and command-line driver for `tsd-core`.
//!
//! ```text
//! min_{Y in O_n} Tr(D^T Y),   D = -A^T B,   B = A X + noise
//! ```
//!
//! [`bench::run_benchmark`] runs TSD (Givens sweep with exact line search)
//! and Riemannian gradient descent (backtracking) on seeded instances and
//! writes gap-closed curves against the percentage of cycles elapsed.

pub mod bench;
pub mod cli;
pub mod config;
pub mod instance;

pub use bench::{run_benchmark, run_instance, BenchConfig, InstanceRun, PartitionChoice, RuleChoice, Series};
pub use instance::{gen_instance, gen_instance_with_noise, ProcrustesInstance};
