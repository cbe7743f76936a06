//! Weighted empirical moments, the centered weighted Gram system, and
//! weighted least-squares fitting.
//!
//! All moments use `1/n` normalization. The covariate matrix is stored
//! column-major so that correlation scans stream one column at a time.

mod cholesky;
mod data;
pub(crate) mod fit;
mod moments;

pub use cholesky::{GrowingCholesky, PIVOT_TOL};
pub use data::{Dataset, WeightVector};
pub use fit::{predict, residual_sigma2, wls_fit, FitResult};
pub use moments::{weighted_moments, GramSource, WeightedDesign, WeightedMoments};
