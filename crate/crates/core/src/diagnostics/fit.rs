//! Small numerical helpers shared by the checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::spectral::{random_field, Field, RandomSpectrum, TorusGrid};

/// Spectral decay exponents cycled through by [`corpus`].
pub const CORPUS_DECAYS: [f64; 3] = [2.0, 3.0, 5.0];

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points to fit a line");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Fourth-order centered differences of uniformly spaced samples at the
/// interior points `2..len-2`; returns `(index, derivative)` pairs.
pub fn centered_derivative(values: &[f64], spacing: f64) -> Vec<(usize, f64)> {
    if values.len() < 5 {
        return Vec::new();
    }
    (2..values.len() - 2)
        .map(|i| {
            let d = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * spacing);
            (i, d)
        })
        .collect()
}

/// Seeded random fields `|f^(xi)| = <xi>^{-decay}` with uniform phases,
/// decays cycling through [`CORPUS_DECAYS`], populated up to `cutoff`.
pub fn corpus(grid: TorusGrid, count: usize, cutoff: i64, seed: u64) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let decay = CORPUS_DECAYS[i % CORPUS_DECAYS.len()];
            let spec = RandomSpectrum::new(1.0, decay, cutoff.min(grid.k_max()));
            random_field(grid, &spec, &mut rng)
        })
        .collect()
}

/// Largest relative deviation `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (a, b) = linear_fit(&x, &y);
        assert!((a - 2.5).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.5)).collect();
        assert!((loglog_slope(&x, &y) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn centered_difference_is_exact_on_quartics() {
        let h = 0.1;
        let v: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(4)).collect();
        for (i, d) in centered_derivative(&v, h) {
            let t = i as f64 * h;
            assert!((d - 4.0 * t.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn corpus_is_reproducible() {
        let g = make_grid(32).unwrap();
        assert_eq!(corpus(g, 5, 10, 3), corpus(g, 5, 10, 3));
        assert_ne!(corpus(g, 5, 10, 3), corpus(g, 5, 10, 4));
    }
}
