//! Importance-weighted orthogonal greedy model selection for
//! high-dimensional linear regression under covariate shift.
//!
//! The pipeline is: build trimmed, normalized importance weights
//! ([`weighting`]), grow a nested greedy path by weighted least squares
//! ([`greedy`]), and pick the iteration count by an information criterion
//! ([`criteria`]). [`evaluation`] and [`simulation`] provide known
//! populations for measuring prediction error; [`harness`] wires it all to
//! config files and the command line.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod criteria;
pub mod error;
pub mod evaluation;
pub mod greedy;
pub mod harness;
pub mod model;
pub mod par;
pub mod rng;
pub mod simulation;
pub mod weighting;

pub use error::{Error, Result};
pub use par::Execution;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
