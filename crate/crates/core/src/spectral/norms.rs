use std::f64::consts::PI;

use super::Field;

fn weighted_sum(f: &Field, weight: impl Fn(f64) -> f64) -> f64 {
    let g = f.grid();
    f.spectrum()
        .iter()
        .enumerate()
        .map(|(idx, c)| weight(g.wavenumber(idx) as f64) * c.norm_sqr())
        .sum()
}

/// `||f||_{L^2}` via Parseval.
pub fn norm_l2(f: &Field) -> f64 {
    (2.0 * PI * weighted_sum(f, |_| 1.0)).sqrt()
}

/// `||f||_{H^s} = 2^{-1/2} (||f||^2 + ||D^s f||^2)^{1/2}`.
pub fn norm_hs(f: &Field, s: f64) -> f64 {
    assert!(s >= 0.0, "norm_hs requires s >= 0, got {s}");
    let sum = weighted_sum(f, |xi| {
        let d = if s == 0.0 { 1.0 } else { xi.abs().powf(2.0 * s) };
        1.0 + d
    });
    (PI * sum).sqrt()
}

/// `(2 pi sum (1 + xi^2)^{-1} |f^(xi)|^2)^{1/2}`.
pub fn norm_hneg1(f: &Field) -> f64 {
    (2.0 * PI * weighted_sum(f, |xi| 1.0 / (1.0 + xi * xi))).sqrt()
}

/// `\int_T f g dx`.
pub fn inner(f: &Field, g: &Field) -> f64 {
    assert_eq!(f.grid(), g.grid(), "grid mismatch in inner product");
    2.0 * PI
        * f.spectrum()
            .iter()
            .zip(g.spectrum())
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn norms_of_cos() {
        let g = make_grid(32).unwrap();
        let c = Field::cos_mode(g, 1, 1.0);
        assert!((norm_l2(&c) - PI.sqrt()).abs() < 1e-14);
        for &s in &[0.0, 0.5, 1.0, 3.6, 4.0, 8.0] {
            assert!((norm_hs(&c, s) - PI.sqrt()).abs() < 1e-14);
        }
        assert!((norm_hneg1(&c) - (PI / 2.0).sqrt()).abs() < 1e-14);
        assert!(inner(&c, &Field::sin_mode(g, 1, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn h0_norm_is_l2_norm() {
        let g = make_grid(64).unwrap();
        let f = Field::from_fn(g, |x| 0.3 + (x.cos()).exp() - (3.0 * x).sin());
        assert!((norm_hs(&f, 0.0) - norm_l2(&f)).abs() < 1e-14);
    }

    #[test]
    fn parseval_against_quadrature() {
        let g = make_grid(64).unwrap();
        let f = Field::from_fn(g, |x| 1.0 + (2.0 * x.sin()).exp());
        let quad: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * g.spacing();
        let n2 = norm_l2(&f).powi(2);
        assert!((n2 - quad).abs() <= 1e-12 * n2);
    }
}
