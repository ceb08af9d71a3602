use std::sync::Arc;

use crate::{Error, Result, Scalar};

use super::Grid;

/// A real function sampled on a shared [`Grid`].
#[derive(Debug, Clone)]
pub struct Curve<T> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> Curve<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::structural(format!(
                "curve has {} values but grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("curve values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.points().iter().map(|&s| f(s)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid<T>>, level: T) -> Result<Self> {
        let values = vec![level; grid.len()];
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when both curves live on the same grid (shared or equal).
    pub fn same_grid(&self, other: &Curve<T>) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|&v| v * c).collect(),
        )
    }

    pub fn sub(&self, other: &Curve<T>) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a - b)
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn add(&self, other: &Curve<T>) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a + b)
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub(crate) fn ensure_same_grid(&self, other: &Curve<T>) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::structural("curves are sampled on different grids"))
        }
    }
}
