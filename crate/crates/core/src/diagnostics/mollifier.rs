//! Rates of the smooth frequency cutoff `L_eta`.
//!
//! With `rho(eta xi) = 1` for `|eta xi| <= 1` and `0` for `|eta xi| >= 2`, the
//! weight comparison `(1 + x^{2(s-a)}) / (1 + x^{2s}) <= 2 x^{-2a}` for `x >= 1`
//! gives `||L_eta f - f||_{H^{s-a}} <= 2^{1/2} eta^a ||f||_{H^s}`, and similarly
//! `||L_eta f||_{H^{s+a}} <= 2^a eta^{-a} ||f||_{H^s}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fit::loglog_slope;
use super::CheckReport;
use crate::error::{Error, Result};
use crate::spectral::{make_grid, norm_hs, random_field, Field, RandomSpectrum};

/// `eta = 2^-3, ..., 2^-10`.
pub const MOLLIFIER_ETAS: [f64; 8] = [
    0.125,
    0.0625,
    0.03125,
    0.015625,
    0.0078125,
    0.00390625,
    0.001953125,
    0.0009765625,
];

/// Grid size resolving `2 / eta` for the smallest `eta`.
pub const MOLLIFIER_N: usize = 8192;

/// Spectral decay beyond `s` of the default test data. The tail then gives a
/// slope of `alpha + EXTRA_DECAY - 1/2`.
pub const EXTRA_DECAY: f64 = 0.6;

/// Allowed shortfall of the fitted slope below `alpha`.
pub const SLOPE_TOL: f64 = 0.1;

const ROUND: f64 = 1e-12;

/// `|f^(xi)| = <xi>^{-(s + EXTRA_DECAY)}` with random phases on `MOLLIFIER_N` points.
pub fn algebraic_field(s: f64, seed: u64) -> Field {
    let grid = make_grid(MOLLIFIER_N).expect("fixed grid size is valid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_field(grid, &RandomSpectrum::new(1.0, s + EXTRA_DECAY, grid.k_max()), &mut rng)
}

pub fn mollifier_rate_check(f: &Field, s: f64, alpha: f64) -> Result<CheckReport> {
    if !(alpha >= 0.0 && alpha <= s) {
        return Err(Error::param("alpha", format!("must lie in [0, s = {s}], got {alpha}")));
    }
    let need = (2.0 / MOLLIFIER_ETAS[MOLLIFIER_ETAS.len() - 1]).ceil() as i64;
    if f.grid().k_max() < need {
        return Err(Error::param(
            "f",
            format!("grid resolves k <= {}, the cutoff sweep needs {need}", f.grid().k_max()),
        ));
    }
    let low = s - alpha;
    let f_s = norm_hs(f, s);
    let f_low = norm_hs(f, low);
    let rows: Vec<[f64; 3]> = MOLLIFIER_ETAS
        .par_iter()
        .map(|&eta| {
            let m = f.mollify(eta);
            [norm_hs(&(&m - f), low), norm_hs(&m, low), norm_hs(&m, s + alpha)]
        })
        .collect();
    let errors: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let slope = loglog_slope(&MOLLIFIER_ETAS, &errors);

    let rate = MOLLIFIER_ETAS
        .iter()
        .zip(&rows)
        .map(|(eta, r)| r[0] / (eta.powf(alpha) * f_s))
        .fold(0.0, f64::max);
    let contraction = rows.iter().map(|r| r[1] / f_low).fold(0.0, f64::max);
    let upper = MOLLIFIER_ETAS
        .iter()
        .zip(&rows)
        .map(|(eta, r)| r[2] * eta.powf(alpha) / f_s)
        .fold(0.0, f64::max);
    let monotone = errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + ROUND));

    let mut mono = CheckReport::at_most("error_monotone_in_eta", if monotone { 0.0 } else { 1.0 }, 0.0);
    mono.passed = monotone;
    let parts = [
        CheckReport::at_least("fitted_slope", slope, alpha - SLOPE_TOL),
        CheckReport::at_most("rate_constant", rate, 2f64.sqrt() * (1.0 + ROUND)),
        CheckReport::at_most("contraction", contraction, 1.0 + ROUND),
        CheckReport::at_most("smoothing_constant", upper, 2f64.powf(alpha) * (1.0 + ROUND)),
        mono,
    ];
    let mut report = CheckReport::all(format!("mollifier_s{s}_alpha{alpha}"), &parts);
    report.measured = slope;
    report.bound = alpha - SLOPE_TOL;
    Ok(report
        .with_column("eta", MOLLIFIER_ETAS.to_vec())
        .with_column("error", errors)
        .with_column("fitted_slope", vec![slope]))
}
