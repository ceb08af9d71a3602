//! The ℓ-indexed recursive regression estimator
//!
//! ```text
//! r_n(χ) = Σ Y_i K(‖χ − X_i‖/h_i) / F(h_i)^ℓ  /  Σ K(‖χ − X_i‖/h_i) / F(h_i)^ℓ
//! ```
//!
//! [`RecursiveEstimator`] keeps, per registered evaluation point, the
//! numerator and denominator sums plus the shared normalizer `Σ F(h_i)^{1−ℓ}`,
//! so `φ_n = num / norm`, `f_n = den / norm` and `r_n = num / den`.

mod batch;
mod config;
mod snapshot;
mod state;

pub use batch::{batch_evaluate, batch_sums};
pub use config::{EstimatorConfig, Truncation};
pub use snapshot::{PointSumsRecord, StateSnapshot};
pub use state::{truncated_gap, Estimate, PointSums, RecursiveEstimator};
