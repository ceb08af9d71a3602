use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Ordered abscissae in `[0, 1]` with trapezoid quadrature weights.
///
/// Every curve of a dataset shares one `Grid` (behind an `Arc`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    points: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(points: Vec<T>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::validation("grid needs at least two points"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::validation("grid points must be finite"));
        }
        if points[0] < T::zero() || points[points.len() - 1] > T::one() {
            return Err(Error::validation("grid points must lie in [0, 1]"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("grid points must be strictly increasing"));
        }
        let m = points.len();
        let half = T::lit(0.5);
        let mut weights = vec![T::zero(); m];
        for k in 0..m - 1 {
            let w = (points[k + 1] - points[k]) * half;
            weights[k] += w;
            weights[k + 1] += w;
        }
        Ok(Self { points, weights })
    }

    /// `m` equally spaced points covering `[0, 1]`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::validation("grid needs at least two points"));
        }
        let last = T::from_count((m - 1) as u64);
        let points = (0..m).map(|k| T::from_count(k as u64) / last).collect();
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn first(&self) -> T {
        self.points[0]
    }

    pub fn last(&self) -> T {
        self.points[self.points.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_span() {
        let g = Grid::new(vec![0.1, 0.15, 0.4, 0.77, 0.9]).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 0.8).abs() < 1e-12);
        assert!(g.weights().iter().all(|w| *w >= 0.0));

        let u = Grid::<f64>::uniform(1001).unwrap();
        let s: f64 = u.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(Grid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(Grid::new(vec![0.3, 0.2]).is_err());
        assert!(Grid::new(vec![-0.1, 0.2]).is_err());
        assert!(Grid::new(vec![0.1, 1.2]).is_err());
        assert!(Grid::new(vec![0.5]).is_err());
        assert!(Grid::new(vec![0.0, f64::NAN]).is_err());
    }
}
