//! Small helpers for uniform time grids and quadrature.

/// Uniformly spaced values `start + k*step`, `k = 0..len`.
pub fn uniform(start: f64, step: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| start + k as f64 * step).collect()
}

/// `n` points from `a` to `b` inclusive. `n >= 2`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|k| a + k as f64 * step).collect()
}

/// Composite trapezoid rule on a uniform grid with spacing `dt`.
pub fn trapz_uniform(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dt * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Cumulative trapezoid integral; output has the same length, starts at 0.
pub fn cumtrapz_uniform(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// All entries finite?
pub fn all_finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}
