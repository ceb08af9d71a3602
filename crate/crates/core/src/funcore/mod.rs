//! Numerical substrate: grids, curves, semi-norms, kernels and quadrature.

mod curve;
mod dataset;
mod grid;
mod kernel;
mod quadrature;
mod seminorm;

pub use curve::Curve;
pub use dataset::{read_curves, read_dataset, write_dataset, Dataset, Observation};
pub use grid::Grid;
pub use kernel::{Kernel, TabulatedKernel};
pub use quadrature::{integrate, simpson_unit, CompensatedSum, FINE_GRID_POINTS};
pub use seminorm::{seminorm_dist, SemiNorm};

/// Evaluates `k` at `t`; shorthand for [`Kernel::eval`].
pub fn kernel_eval<T: crate::Scalar>(k: &Kernel<T>, t: T) -> crate::Result<T> {
    k.eval(t)
}
