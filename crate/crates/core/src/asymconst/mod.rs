//! Kernel constants, bandwidth Cesàro sums and leading-order predictors.
//!
//! With `φ(h) = h^γ` and `h_i = h₁ i^{−a}` the ratios `φ(h_i)/φ(h_n)` equal
//! `(n/i)^{aγ}`, so every Cesàro limit is a Riemann integral of a power of
//! `u = i/n` and has a closed form.

mod constants;
mod predict;
mod schedule;
mod sequences;
mod tau;

pub use constants::{
    m_constants, m_constants_by_parts, m_constants_direct, AsymptoticConstants, MConstants,
};
pub use predict::{
    as_bound, predict, predict_bias, predict_mse, predict_second_order, v_ell, PointInputs,
    SecondOrder, TheoryPrediction,
};
pub use schedule::BandwidthSchedule;
pub use sequences::{alpha_limit, beta_limit, finite_sequences, limits, H4Violation, SequenceSums};
pub use tau::TauModel;
