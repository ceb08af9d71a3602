use funrec::CompensatedSum;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum<f64>>().value() / xs.len() as f64
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let s: CompensatedSum<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    s.value() / (xs.len() as f64 - 1.0)
}

pub fn variance(xs: &[f64]) -> f64 {
    covariance(xs, xs)
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Standard error of the sample covariance, from the spread of the centered
/// cross products.
pub fn covariance_std_error(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let prods: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    std_error(&prods)
}

/// Standard error of the sample variance under a normal approximation.
pub fn variance_std_error(xs: &[f64]) -> f64 {
    variance(xs) * (2.0 / (xs.len() as f64 - 1.0)).sqrt()
}

/// OLS slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: CompensatedSum<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let sxx: CompensatedSum<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    sxy.value() / sxx.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&x), 2.5);
        assert!((variance(&x) - 5.0 / 3.0).abs() < 1e-15);
        let y = [2.0, 4.0, 6.0, 8.0];
        assert!((covariance(&x, &y) - 10.0 / 3.0).abs() < 1e-15);
        assert!((ols_slope(&x, &y) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mean_is_order_independent() {
        let xs: Vec<f64> = (0..10_000)
            .map(|k| ((k * 7919) % 1000) as f64 * 1e-3 + 1e8)
            .collect();
        let mut rev = xs.clone();
        rev.reverse();
        assert!((mean(&xs) - mean(&rev)).abs() <= 1e-9 * mean(&xs).abs());
    }
}
