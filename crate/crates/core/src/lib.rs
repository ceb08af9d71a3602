//! Recursive kernel regression for functional (curve-valued) covariates.
//!
//! The crate is organised around four pieces:
//!
//! - [`funcore`]: grids, curves, semi-norms, kernels and quadrature.
//! - [`asymconst`]: kernel constants, bandwidth Cesàro sums and their limits,
//!   and the leading-order bias / variance / MSE / almost-sure bound predictors.
//! - [`smallball`]: models of the small-ball probability `F(h) = P(‖χ − X‖ ≤ h)`.
//! - [`estimator`]: the ℓ-indexed recursive estimator with streaming state,
//!   a truncated variant and a direct batch evaluation.
//!
//! Everything numeric is generic over a [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the scalar for the common cases.

pub mod asymconst;
pub mod error;
pub mod estimator;
pub mod funcore;
pub mod scalar;
pub mod smallball;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use asymconst::{
    AsymptoticConstants, BandwidthSchedule, MConstants, SecondOrder, SequenceSums, TauModel,
    TheoryPrediction,
};
pub use estimator::{Estimate, EstimatorConfig, RecursiveEstimator, StateSnapshot, Truncation};
pub use funcore::{CompensatedSum, Curve, Dataset, Grid, Kernel, Observation, SemiNorm};
pub use smallball::{PowerLawFit, SmallBallKind, SmallBallModel};

pub type Grid64 = Grid<f64>;
pub type Curve64 = Curve<f64>;
pub type Kernel64 = Kernel<f64>;
pub type Dataset64 = Dataset<f64>;
pub type Observation64 = Observation<f64>;
pub type SmallBallModel64 = SmallBallModel<f64>;
pub type BandwidthSchedule64 = BandwidthSchedule<f64>;
pub type TauModel64 = TauModel<f64>;
pub type AsymptoticConstants64 = AsymptoticConstants<f64>;
pub type EstimatorConfig64 = EstimatorConfig<f64>;
pub type RecursiveEstimator64 = RecursiveEstimator<f64>;

pub type Grid32 = Grid<f32>;
pub type Curve32 = Curve<f32>;
pub type Kernel32 = Kernel<f32>;
pub type EstimatorConfig32 = EstimatorConfig<f32>;
pub type RecursiveEstimator32 = RecursiveEstimator<f32>;
