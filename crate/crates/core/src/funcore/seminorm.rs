use serde::{Deserialize, Serialize};

use crate::{Result, Scalar};

use super::{CompensatedSum, Curve};

/// Semi-norm used to measure closeness of curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiNorm {
    /// `(∫ x(s)² ds)^{1/2}` with trapezoid weights.
    L2,
    /// `max_k |x(s_k)|` over the grid.
    Sup,
    /// L2 norm of the piecewise-linear derivative; vanishes on constants.
    DerivL2,
}

impl SemiNorm {
    /// Semi-norm of the difference `a − b` computed without allocating.
    pub fn dist<T: Scalar>(self, a: &Curve<T>, b: &Curve<T>) -> Result<T> {
        a.ensure_same_grid(b)?;
        let (av, bv) = (a.values(), b.values());
        let d = |k: usize| av[k] - bv[k];
        let value = match self {
            SemiNorm::L2 => a
                .grid()
                .weights()
                .iter()
                .enumerate()
                .map(|(k, &w)| {
                    let dk = d(k);
                    w * dk * dk
                })
                .collect::<CompensatedSum<T>>()
                .value()
                .sqrt(),
            SemiNorm::Sup => (0..av.len()).fold(T::zero(), |m, k| m.max(d(k).abs())),
            SemiNorm::DerivL2 => {
                let pts = a.grid().points();
                (0..pts.len() - 1)
                    .map(|k| {
                        let width = pts[k + 1] - pts[k];
                        let slope = (d(k + 1) - d(k)) / width;
                        width * slope * slope
                    })
                    .collect::<CompensatedSum<T>>()
                    .value()
                    .sqrt()
            }
        };
        Ok(value)
    }

    pub fn norm<T: Scalar>(self, x: &Curve<T>) -> Result<T> {
        let zero = Curve::constant(x.grid().clone(), T::zero())?;
        self.dist(x, &zero)
    }
}

/// `‖a − b‖` under `s`.
pub fn seminorm_dist<T: Scalar>(a: &Curve<T>, b: &Curve<T>, s: SemiNorm) -> Result<T> {
    s.dist(a, b)
}
