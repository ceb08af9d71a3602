use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Bandwidths `h_i = h₁ · i^{−a}`, `i ≥ 1`.
///
/// `a = 0` is accepted as the constant-bandwidth degenerate case; every
/// `0 < a < 1` gives a strictly decreasing sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSchedule<T> {
    pub h1: T,
    pub a: T,
}

impl<T: Scalar> BandwidthSchedule<T> {
    pub fn new(h1: T, a: T) -> Result<Self> {
        let s = Self { h1, a };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(h: T) -> Result<Self> {
        Self::new(h, T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h1.is_finite() && self.h1 > T::zero()) {
            return Err(Error::validation("h1 must be positive"));
        }
        if !(self.a >= T::zero() && self.a < T::one()) {
            return Err(Error::validation("bandwidth exponent a must lie in [0, 1)"));
        }
        Ok(())
    }

    /// `h_i` for `i ≥ 1`.
    pub fn h(&self, i: u64) -> T {
        debug_assert!(i >= 1);
        if self.a == T::zero() {
            self.h1
        } else {
            self.h1 * T::from_count(i).powf(-self.a)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.a == T::zero()
    }

    /// `n h_n² → 0`, the extra hypothesis of the almost-sure bound.
    pub fn n_h_squared_vanishes(&self) -> bool {
        self.a > T::lit(0.5)
    }

    /// `n φ(h_n) → ∞` for `φ(h) = h^γ`, i.e. `aγ < 1`.
    pub fn n_phi_diverges(&self, gamma: T) -> bool {
        self.a * gamma < T::one()
    }
}
