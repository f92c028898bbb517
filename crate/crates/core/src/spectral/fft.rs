//! Thread-local FFT plan cache.
//!
//! `FftPlanner` is not `Sync`, so each worker thread keeps its own planner.
//! The planned transforms themselves are `Arc<dyn Fft>` and cheap to reuse.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct PlanCache {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
    scratch: Vec<Complex64>,
}

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache {
        planner: FftPlanner::new(),
        forward: HashMap::new(),
        inverse: HashMap::new(),
        scratch: Vec::new(),
    });
}

fn run(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    PLANS.with(|cell| {
        let cache = &mut *cell.borrow_mut();
        let map = if inverse {
            &mut cache.inverse
        } else {
            &mut cache.forward
        };
        let fft = map
            .entry(n)
            .or_insert_with(|| {
                if inverse {
                    cache.planner.plan_fft_inverse(n)
                } else {
                    cache.planner.plan_fft_forward(n)
                }
            })
            .clone();
        let need = fft.get_inplace_scratch_len();
        if cache.scratch.len() < need {
            cache.scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        fft.process_with_scratch(buf, &mut cache.scratch[..need]);
    });
}

/// Unnormalized forward transform: `X_k = sum_j x_j e^{-2 pi i jk/n}`.
pub(crate) fn forward(buf: &mut [Complex64]) {
    run(buf, false);
}

/// Unnormalized inverse transform: `x_j = sum_k X_k e^{+2 pi i jk/n}`.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    run(buf, true);
}
