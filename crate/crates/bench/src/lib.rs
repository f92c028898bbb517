//! Seeded inputs shared by the benchmarks.

use bo4lab_core::spectral::{make_grid, seeded_field, RandomSpectrum};
use bo4lab_core::Field;

/// Grid sizes swept by the kernel benchmarks.
pub const SIZES: [usize; 3] = [256, 1024, 4096];

/// Smooth mean-free field on `n` points with `|u^(xi)| ~ <xi>^{-3}` and
/// sup norm of order one.
pub fn fixture(n: usize, seed: u64) -> Field {
    let grid = make_grid(n).expect("benchmark sizes are valid");
    let spec = RandomSpectrum::new(1.0, 3.0, grid.k_max() / 3).mean_free();
    seeded_field(grid, &spec, seed)
}
