use bo4lab_core::diagnostics::symbols::{symbol_pair, InequalityId};
use bo4lab_core::energy::{choose_big_constant, energy_parts, EnergyKind};
use bo4lab_core::equations::{nonlinear_flux, rhs};
use bo4lab_core::spectral::{make_grid, norm_l2, random_field, Multiplier, RandomSpectrum};
use bo4lab_core::{CoefficientSet, Field, SolverParams, TimeDirection};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(n: usize, seed: u64, decay: f64, cutoff: i64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_field(
        make_grid(n).unwrap(),
        &RandomSpectrum::new(1.0, decay, cutoff),
        &mut rng,
    )
}

fn coeffs() -> impl Strategy<Value = CoefficientSet> {
    prop::array::uniform8(-3.0..3.0f64).prop_map(CoefficientSet::from_array)
}

fn close(a: &Field, b: &Field, tol: f64) -> bool {
    norm_l2(&(a - b)) <= tol * (1.0 + norm_l2(a).max(norm_l2(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rhs_has_no_mean_mode(seed in any::<u64>(), c in coeffs(), eps in 0.0..0.5f64) {
        let u = field(64, seed, 3.0, 10);
        let p = SolverParams::new(c, eps).unwrap();
        prop_assert!(rhs(&u, &p).mean().abs() < 1e-12);
    }

    #[test]
    fn rhs_commutes_with_grid_translations(seed in any::<u64>(), c in coeffs(), shift in -40isize..40) {
        let u = field(64, seed, 3.0, 10);
        let p = SolverParams::new(c, 1e-2).unwrap();
        let a = rhs(&u.translate(shift), &p);
        let b = rhs(&u, &p).translate(shift);
        prop_assert!(close(&a, &b, 1e-11));
    }

    #[test]
    fn flux_is_linear_in_the_coefficients(
        seed in any::<u64>(), c1 in coeffs(), c2 in coeffs(), a in -2.0..2.0f64
    ) {
        let u = field(64, seed, 3.0, 10);
        let lhs = nonlinear_flux(&u, &(c1 + c2 * a));
        let rhs = &nonlinear_flux(&u, &c1) + &nonlinear_flux(&u, &c2).scale(a);
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn reversed_viscosity_flips_only_the_damping(seed in any::<u64>(), eps in 0.0..0.5f64) {
        let u = field(32, seed, 4.0, 6);
        let p = SolverParams::new(CoefficientSet::INTEGRABLE, eps).unwrap();
        let q = p.reversed();
        prop_assert_eq!(q.time_direction, TimeDirection::Backward);
        let diff = &rhs(&u, &p) - &rhs(&u, &q);
        let expect = u.deriv(4).scale(-2.0 * eps);
        prop_assert!(close(&diff, &expect, 1e-12));
    }

    #[test]
    fn multipliers_are_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0..3.0f64, s in 0.0..6.0f64) {
        let f = field(64, s1, 2.0, 31);
        let g = field(64, s2, 3.0, 31);
        for m in [Multiplier::Hilbert, Multiplier::Deriv(3), Multiplier::FracDeriv(s), Multiplier::BesselWeight(-s), Multiplier::J, Multiplier::Mollify(0.2)] {
            let lhs = (&f + &g.scale(a)).apply(&m);
            let rhs = &f.apply(&m) + &g.apply(&m).scale(a);
            prop_assert!(close(&lhs, &rhs, 1e-12), "{m:?}");
        }
    }

    #[test]
    fn sandwich_holds_with_the_selected_constant(s1 in any::<u64>(), s2 in any::<u64>(), amp in 0.01..3.0f64) {
        let f = field(64, s1, 4.0, 12).scale(amp);
        let g = field(64, s2, 4.0, 12).scale(amp);
        let c = CoefficientSet::INTEGRABLE;
        for kind in [EnergyKind::Hs(4.0), EnergyKind::L2] {
            let k = choose_big_constant(&f, &g, kind, &c).unwrap();
            let (lo, hi) = energy_parts(&f, &g, kind, &c).unwrap().sandwich_margins(k);
            prop_assert!(lo >= 0.0 && hi >= 0.0);
        }
    }

    #[test]
    fn symbol_lhs_vanishes_where_rhs_does(xi in -512i64..=512, s_idx in 0usize..5) {
        let s = [0.0, 1.0, 2.0, 2.5, 3.7][s_idx];
        for id in [InequalityId::ThirdOrderSymbol, InequalityId::PowerDifference, InequalityId::FirstOrderSymbol] {
            for eta in [0, xi] {
                let (lhs, rhs, size) = symbol_pair(id, s, xi, eta);
                if rhs == 0.0 {
                    prop_assert!(lhs <= 1e-12 * size, "{id:?} s={s} ({xi},{eta}): {lhs}");
                }
            }
        }
    }
}
