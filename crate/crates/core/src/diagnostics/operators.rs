//! Operator algebra on random corpora: `HH = -I + mean`, the `J` bound and
//! the frequency estimate for `HJ d^{k+1} - d^k`.

use rayon::prelude::*;

use super::fit::corpus;
use super::CheckReport;
use crate::spectral::{inner, norm_hneg1, norm_l2, Field, TorusGrid};

/// Relative tolerance used throughout the operator checks.
pub const OPERATOR_TOL: f64 = 1e-10;

/// Worst value of `measure` over the corpus.
fn worst(fields: &[Field], measure: impl Fn(&Field) -> f64 + Sync + Send) -> f64 {
    fields.par_iter().map(measure).reduce(
        || 0.0,
        |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) },
    )
}

/// `||HHf + f - f^(0)|| / ||f||` over the corpus.
pub fn hilbert_square_check(fields: &[Field]) -> CheckReport {
    let m = worst(fields, |f| {
        let expect = (-f).axpby(1.0, &Field::constant(f.grid(), f.mean()), 1.0);
        norm_l2(&(&f.hilbert().hilbert() - &expect)) / norm_l2(f).max(f64::MIN_POSITIVE)
    });
    CheckReport::at_most("hilbert_square", m, OPERATOR_TOL)
}

/// `||Jf|| / (2 ||f||_{H^{-1}})` over the corpus, minus one (must be `<= tol`).
pub fn j_bound_check(fields: &[Field]) -> CheckReport {
    let m = worst(fields, |f| norm_l2(&f.j_op()) / (2.0 * norm_hneg1(f)) - 1.0);
    CheckReport::at_most("j_bound", m, OPERATOR_TOL)
}

/// `||HJ d^{k+1} f - d^k f|| / (2^k ||f||) - 1` for `k = 0..=3`.
pub fn frequency_estimate_check(fields: &[Field]) -> CheckReport {
    let parts: Vec<CheckReport> = (0..=3u32)
        .map(|k| {
            let m = worst(fields, |f| {
                let lhs = &f.deriv(k + 1).j_op().hilbert() - &f.deriv(k);
                norm_l2(&lhs) / (2f64.powi(k as i32) * norm_l2(f)) - 1.0
            });
            CheckReport::at_most(format!("freq_estimate_k{k}"), m, OPERATOR_TOL)
        })
        .collect();
    CheckReport::all("freq_estimate", &parts)
}

/// `|<Hf, g> + <f, Hg>|` relative to `||f|| ||g||`, on consecutive pairs.
pub fn skew_adjoint_check(fields: &[Field]) -> CheckReport {
    let m = fields
        .par_windows(2)
        .map(|w| {
            let (f, g) = (&w[0], &w[1]);
            (inner(&f.hilbert(), g) + inner(f, &g.hilbert())).abs() / (norm_l2(f) * norm_l2(g))
        })
        .reduce(|| 0.0, f64::max);
    CheckReport::at_most("hilbert_skew_adjoint", m, OPERATOR_TOL)
}

/// Parseval against the trapezoid rule on the samples.
pub fn parseval_check(fields: &[Field]) -> CheckReport {
    let m = worst(fields, |f| {
        let h = f.grid().spacing();
        let quad: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * h;
        let n2 = norm_l2(f).powi(2);
        (quad - n2).abs() / n2
    });
    CheckReport::at_most("parseval", m, OPERATOR_TOL)
}

/// Every operator identity and inequality above on `count` seeded fields.
pub fn operator_algebra_check(grid: TorusGrid, count: usize, seed: u64) -> CheckReport {
    let fields = corpus(grid, count, grid.k_max(), seed);
    let parts = [
        hilbert_square_check(&fields),
        j_bound_check(&fields),
        frequency_estimate_check(&fields),
        skew_adjoint_check(&fields),
        parseval_check(&fields),
    ];
    CheckReport::all("operator_algebra", &parts).with_column("fields", vec![fields.len() as f64])
}
