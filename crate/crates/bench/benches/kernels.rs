use std::hint::black_box;

use bo4lab_bench::{fixture, SIZES};
use bo4lab_core::energy::{energy_parts, EnergyKind};
use bo4lab_core::equations::rhs;
use bo4lab_core::evolve::Stepper;
use bo4lab_core::spectral::dealiased_product;
use bo4lab_core::{CoefficientSet, Field, Scheme, SolverParams};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn multipliers(c: &mut Criterion) {
    let mut g = c.benchmark_group("multiplier");
    for n in SIZES {
        let f = fixture(n, 0);
        g.bench_with_input(BenchmarkId::new("hilbert", n), &f, |b, f| {
            b.iter(|| black_box(f.hilbert()))
        });
        g.bench_with_input(BenchmarkId::new("frac_deriv_4.5", n), &f, |b, f| {
            b.iter(|| black_box(f.frac_deriv(4.5)))
        });
        g.bench_with_input(BenchmarkId::new("mollify", n), &f, |b, f| {
            b.iter(|| black_box(f.mollify(0.05)))
        });
    }
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("dealiased_product");
    for n in SIZES {
        let (f, h) = (fixture(n, 1), fixture(n, 2));
        g.bench_function(BenchmarkId::new("quadratic", n), |b| {
            b.iter(|| black_box(dealiased_product(&[&f, &h]).unwrap()))
        });
        g.bench_function(BenchmarkId::new("quartic", n), |b| {
            b.iter(|| black_box(dealiased_product(&[&f, &h, &f, &h]).unwrap()))
        });
    }
    g.finish();
}

fn right_hand_side(c: &mut Criterion) {
    let p = SolverParams::new(CoefficientSet::INTEGRABLE, 1e-3).unwrap();
    let mut g = c.benchmark_group("rhs");
    for n in SIZES {
        let u = fixture(n, 3).scale(0.1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| {
            b.iter(|| black_box(rhs(u, &p)))
        });
    }
    g.finish();
}

fn time_step(c: &mut Criterion) {
    let p = SolverParams::new(CoefficientSet::INTEGRABLE, 1e-3).unwrap();
    let mut g = c.benchmark_group("step");
    for n in SIZES {
        let u = fixture(n, 4).scale(0.1);
        for scheme in [Scheme::Etdrk4, Scheme::Ifrk4] {
            let stepper = Stepper::new(u.grid(), &p, 1e-4, scheme).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("{scheme:?}"), n), &u, |b, u| {
                b.iter(|| black_box(stepper.step(u)))
            });
        }
    }
    g.finish();
}

fn energies(c: &mut Criterion) {
    let mut g = c.benchmark_group("energy_parts");
    for n in SIZES {
        let (f, h) = (fixture(n, 5).scale(0.1), fixture(n, 6).scale(0.1));
        let zero = Field::zeros(f.grid());
        g.bench_function(BenchmarkId::new("hs_4", n), |b| {
            b.iter(|| black_box(energy_parts(&f, &h, EnergyKind::Hs(4.0), &CoefficientSet::INTEGRABLE).unwrap()))
        });
        g.bench_function(BenchmarkId::new("l2", n), |b| {
            b.iter(|| black_box(energy_parts(&f, &zero, EnergyKind::L2, &CoefficientSet::INTEGRABLE).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, multipliers, products, right_hand_side, time_step, energies);
criterion_main!(benches);
