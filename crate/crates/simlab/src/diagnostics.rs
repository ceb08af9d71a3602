/// Sample autocorrelation of `series` at `lag`.
pub fn lag_autocorrelation(series: &[f64], lag: usize) -> f64 {
    let n = series.len();
    assert!(lag < n, "lag {lag} must be below the series length {n}");
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    let cov: f64 = (0..n - lag)
        .map(|t| (series[t] - mean) * (series[t + lag] - mean))
        .sum();
    cov / var
}

/// Least-squares `ρ ∈ (0, 1)` in `corr[k−1] ≈ ρ^k`, by golden-section search.
pub fn fit_geometric_decay(corr: &[f64]) -> f64 {
    let loss = |rho: f64| -> f64 {
        corr.iter()
            .enumerate()
            .map(|(k, c)| (c - rho.powi(k as i32 + 1)).powi(2))
            .sum()
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    while b - a > 1e-10 {
        if loss(c) < loss(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}
