use crate::{Error, Result, Scalar};

use super::Grid;

/// Size of the dedicated grid used for kernel-constant quadrature.
pub const FINE_GRID_POINTS: usize = 2001;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Scalar> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Trapezoid-rule integral of values tabulated on `grid`.
pub fn integrate<T: Scalar>(values: &[T], grid: &Grid<T>) -> Result<T> {
    if values.len() != grid.len() {
        return Err(Error::structural(format!(
            "tabulation has {} values but grid has {} points",
            values.len(),
            grid.len()
        )));
    }
    Ok(values
        .iter()
        .zip(grid.weights())
        .map(|(&v, &w)| v * w)
        .collect::<CompensatedSum<T>>()
        .value())
}

/// Composite Simpson rule for `f` over `[0, 1]` using `points` equally spaced
/// nodes (`points` must be odd and at least 3).
pub fn simpson_unit<T: Scalar>(f: impl Fn(T) -> T, points: usize) -> T {
    assert!(
        points >= 3 && points % 2 == 1,
        "simpson needs an odd node count >= 3"
    );
    let intervals = T::from_count((points - 1) as u64);
    let step = T::one() / intervals;
    let mut acc = CompensatedSum::new();
    for k in 0..points {
        let s = T::from_count(k as u64) / intervals;
        let w = if k == 0 || k == points - 1 {
            T::one()
        } else if k % 2 == 1 {
            T::lit(4.0)
        } else {
            T::lit(2.0)
        };
        acc.add(w * f(s));
    }
    acc.value() * step / T::lit(3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tab(g: &Grid<f64>, f: impl Fn(f64) -> f64) -> Vec<f64> {
        g.points().iter().map(|&s| f(s)).collect()
    }

    #[test]
    fn trapezoid_examples() {
        let g = Grid::<f64>::uniform(11).unwrap();
        assert!((integrate(&tab(&g, |_| 1.0), &g).unwrap() - 1.0).abs() < 1e-15);
        assert!((integrate(&tab(&g, |s| s), &g).unwrap() - 0.5).abs() < 1e-15);
        let fine = Grid::<f64>::uniform(1001).unwrap();
        let v = integrate(&tab(&fine, |s| s * s), &fine).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn trapezoid_exact_for_linear_on_irregular_grid() {
        let g = Grid::new(vec![0.0, 0.13, 0.2, 0.61, 0.9, 1.0]).unwrap();
        let v = integrate(&tab(&g, |s| 3.0 - 2.0 * s), &g).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn refinement_reduces_error() {
        let exact = 1.0 - (1.0f64).cos();
        let mut prev = f64::INFINITY;
        for m in [11, 21, 41, 81] {
            let g = Grid::<f64>::uniform(m).unwrap();
            let err = (integrate(&tab(&g, f64::sin), &g).unwrap() - exact).abs();
            assert!(err <= prev / 2.0);
            prev = err;
        }
    }

    #[test]
    fn simpson_exact_for_cubics() {
        let v = simpson_unit(|s: f64| 4.0 * s * s * s - s + 2.0, 5);
        assert!((v - 2.5).abs() < 1e-14);
    }

    #[test]
    fn mismatched_tabulation_is_rejected() {
        let g = Grid::<f64>::uniform(5).unwrap();
        assert!(matches!(
            integrate(&[1.0, 2.0], &g),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1.0e16);
        assert_eq!(s.value(), 1000.0);
    }
}
