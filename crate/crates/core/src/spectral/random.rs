use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Field, TorusGrid};

/// Random band-limited spectrum `|f^(xi)| = A <xi>^{-decay}` with uniform phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSpectrum {
    pub amplitude: f64,
    pub decay: f64,
    /// Highest populated mode; clamped to the grid's `k_max`.
    pub cutoff: i64,
    /// Whether the mean mode is populated (with a random sign-weighted value).
    pub with_mean: bool,
}

impl RandomSpectrum {
    pub fn new(amplitude: f64, decay: f64, cutoff: i64) -> Self {
        Self {
            amplitude,
            decay,
            cutoff,
            with_mean: true,
        }
    }

    pub fn mean_free(mut self) -> Self {
        self.with_mean = false;
        self
    }
}

/// Draws one field. The random stream consumed depends only on `spec`, not on
/// the grid, so the same seed yields the same function on every grid that
/// resolves `spec.cutoff`.
pub fn random_field<R: Rng + ?Sized>(grid: TorusGrid, spec: &RandomSpectrum, rng: &mut R) -> Field {
    let cutoff = spec.cutoff.max(0);
    let mut modes = Vec::with_capacity(cutoff as usize + 1);
    let phase0: f64 = rng.gen_range(0.0..2.0 * PI);
    if spec.with_mean {
        modes.push((0, Complex64::new(spec.amplitude * phase0.cos(), 0.0)));
    }
    for xi in 1..=cutoff {
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        if xi > grid.k_max() {
            continue;
        }
        let mag = spec.amplitude * (1.0 + (xi * xi) as f64).powf(-0.5 * spec.decay);
        modes.push((xi, Complex64::from_polar(mag, phase)));
    }
    Field::from_modes(grid, &modes).expect("modes clamped to grid")
}

/// [`random_field`] driven by a fresh ChaCha8 stream seeded with `seed`.
pub fn seeded_field(grid: TorusGrid, spec: &RandomSpectrum, seed: u64) -> Field {
    random_field(grid, spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn same_seed_same_function_across_grids() {
        let spec = RandomSpectrum::new(1.0, 3.0, 12);
        let a = random_field(make_grid(32).unwrap(), &spec, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_field(make_grid(128).unwrap(), &spec, &mut ChaCha8Rng::seed_from_u64(9));
        for xi in -12..=12 {
            assert_eq!(a.coeff(xi), b.coeff(xi));
        }
        assert_eq!(b.coeff(13), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn magnitudes_follow_decay() {
        let spec = RandomSpectrum::new(2.0, 2.0, 10).mean_free();
        let f = random_field(make_grid(64).unwrap(), &spec, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(f.mean(), 0.0);
        for xi in 1..=10 {
            let want = 2.0 / (1.0 + (xi * xi) as f64);
            assert!((f.coeff(xi).norm() - want).abs() < 1e-14);
        }
    }
}
