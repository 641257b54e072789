//! Fixed-step quadrature over Gaussian densities in the dB domain.

use std::f64::consts::{PI, SQRT_2};

/// Integration grid used for every density integral: the nominal dB step
/// and how many standard deviations either side of the mean are covered.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegrationGrid {
    pub step_db: f64,
    pub span_sigmas: f64,
}

impl Default for IntegrationGrid {
    fn default() -> Self {
        Self { step_db: 0.1, span_sigmas: 8.0 }
    }
}

#[inline]
pub fn gaussian_pdf(x: f64, mean: f64, sigma: f64) -> f64 {
    let z = (x - mean) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

/// P(X > threshold) for X ~ N(mean, sigma²).
#[inline]
pub fn gaussian_upper_tail(threshold: f64, mean: f64, sigma: f64) -> f64 {
    0.5 * libm::erfc((threshold - mean) / (sigma * SQRT_2))
}

/// Composite Simpson rule on `[a, b]` with the largest even number of
/// panels whose width does not exceed `max_step`.
pub fn simpson(a: f64, b: f64, max_step: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut n = ((b - a) / max_step).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    (f(a) + f(b) + 4.0 * odd + 2.0 * even) * h / 3.0
}

/// `E[g(X) | X > lower]` for `X ~ N(mean, sigma²)`, integrated on the grid.
/// Returns `None` when the conditioning event carries no mass on the grid.
pub fn truncated_expectation(
    mean: f64,
    sigma: f64,
    lower: f64,
    grid: &IntegrationGrid,
    g: impl Fn(f64) -> f64,
) -> Option<f64> {
    let lo = lower.max(mean - grid.span_sigmas * sigma);
    let hi = mean + grid.span_sigmas * sigma;
    if lo >= hi {
        return None;
    }
    let mass = simpson(lo, hi, grid.step_db, |x| gaussian_pdf(x, mean, sigma));
    if mass <= 1e-300 {
        return None;
    }
    let num = simpson(lo, hi, grid.step_db, |x| g(x) * gaussian_pdf(x, mean, sigma));
    Some(num / mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(0.0, 2.0, 0.7, |x| x * x * x - x + 1.0);
        assert!((v - (4.0 - 2.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass_and_tail() {
        let grid = IntegrationGrid::default();
        let m = simpson(-24.0, 24.0, grid.step_db, |x| gaussian_pdf(x, 0.0, 3.0));
        assert!((m - 1.0).abs() < 1e-12);
        let tail = simpson(1.5, 24.0, grid.step_db, |x| gaussian_pdf(x, 0.0, 3.0));
        assert!((tail - gaussian_upper_tail(1.5, 0.0, 3.0)).abs() < 1e-8, "{tail}");
    }

    #[test]
    fn truncated_expectation_of_one_is_one() {
        let grid = IntegrationGrid::default();
        let v = truncated_expectation(2.0, 3.0, 4.3, &grid, |_| 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(truncated_expectation(0.0, 1.0, 9.0, &grid, |_| 1.0).is_none());
    }
}
