use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Kernel tabulated on equally spaced nodes of `[0, 1]`, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedKernel<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> TabulatedKernel<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        let k = Self { values };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(Error::validation(
                "tabulated kernel needs at least two nodes",
            ));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::validation(
                "tabulated kernel values must be finite and nonnegative",
            ));
        }
        Ok(())
    }

    fn interpolate(&self, t: T) -> T {
        let last = self.values.len() - 1;
        let x = t * T::from_count(last as u64);
        let k = x.floor().to_usize().unwrap_or(0).min(last - 1);
        let frac = x - T::from_count(k as u64);
        self.values[k] + (self.values[k + 1] - self.values[k]) * frac
    }
}

/// Kernel supported on `[0, 1]`, evaluated at `‖χ − x‖ / h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel<T> {
    /// `K(t) = 1` on `[0, 1]`.
    Uniform,
    /// `K(t) = 2(1 − t)`.
    Triangle,
    /// `K(t) = (3/2)(1 − t²)`.
    Quadratic,
    Custom(TabulatedKernel<T>),
}

impl<T: Scalar> Kernel<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::Custom(tab) => tab.validate(),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: T) -> Result<T> {
        if t.is_nan() || t < T::zero() {
            return Err(Error::domain(format!(
                "kernel argument must be >= 0, got {t}"
            )));
        }
        if t > T::one() {
            return Ok(T::zero());
        }
        Ok(self.eval_unit(t))
    }

    /// Evaluation for `t` already known to lie in `[0, 1]`.
    pub(crate) fn eval_unit(&self, t: T) -> T {
        match self {
            Kernel::Uniform => T::one(),
            Kernel::Triangle => T::lit(2.0) * (T::one() - t),
            Kernel::Quadratic => T::lit(1.5) * (T::one() - t * t),
            Kernel::Custom(tab) => tab.interpolate(t),
        }
    }

    /// `K'(t)` on `(0, 1)` for kernels with a closed-form derivative.
    pub fn derivative(&self, t: T) -> Option<T> {
        match self {
            Kernel::Uniform => Some(T::zero()),
            Kernel::Triangle => Some(-T::lit(2.0)),
            Kernel::Quadratic => Some(-T::lit(3.0) * t),
            Kernel::Custom(_) => None,
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        !matches!(self, Kernel::Custom(_))
    }

    pub fn value_at_one(&self) -> T {
        self.eval_unit(T::one())
    }

    pub fn sup(&self) -> T {
        match self {
            Kernel::Uniform => T::one(),
            Kernel::Triangle => T::lit(2.0),
            Kernel::Quadratic => T::lit(1.5),
            Kernel::Custom(tab) => tab.values.iter().fold(T::zero(), |m, &v| m.max(v)),
        }
    }

    /// `inf_{t ∈ [0,1]} K(t)`.
    pub fn inf_on_unit(&self) -> T {
        match self {
            Kernel::Uniform => T::one(),
            Kernel::Triangle | Kernel::Quadratic => T::zero(),
            Kernel::Custom(tab) => tab.values.iter().fold(T::infinity(), |m, &v| m.min(v)),
        }
    }

    /// Bounded, supported on `[0, 1]` and bounded away from zero there.
    pub fn is_admissible(&self) -> bool {
        self.validate().is_ok() && self.inf_on_unit() > T::zero()
    }
}
