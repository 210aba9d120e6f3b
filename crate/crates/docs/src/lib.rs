//! Consistency checks for the documentation under `docs/`.
//!
//! The crate has no code of its own. Its tests check that relative links in
//! the markdown files resolve and that `docs/reference.md` names every public
//! item of `tsd-core` and `tsd-bench` under the heading of its module.
