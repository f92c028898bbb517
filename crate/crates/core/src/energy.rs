//! Modified energies with cubic and quartic correction terms.
//!
//! For `w = f - g`,
//!
//! ```text
//! E_s(f,g) = 1/2 ||w||^2 (1 + Cs ||f||^2 + Cs ||f||^{4s}) + 1/2 ||D^s w||^2 + M1 + M2 + M3
//! M1 = l1/4 \int f (H D^s w)(H D^{s-1} w)
//! M2 = l2/4 \int (H f_x)(D^{s-1} w)^2
//! M3 = (l1 l4 + 4 l3)/32 \int f^2 (D^{s-1} w)^2
//! ```
//!
//! The L2-level energy `E(f,g)` uses `l_j(0)`, replaces `D^{-1}` by `J` and
//! weights the `H^{-1}` norm of `w` instead of its `L^2` norm.

use serde::{Deserialize, Serialize};

use crate::equations::CoefficientSet;
use crate::error::{Error, Result};
use crate::spectral::{norm_hneg1, norm_hs, norm_l2, Field, Lifted};

/// Indices and constants entering `E_s` and `E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub s: f64,
    pub s0: f64,
    /// Weight constant of `E_s`.
    pub cs: f64,
    /// Weight constant of the L2-level energy.
    pub c0: f64,
}

impl EnergyParams {
    pub fn new(s: f64, s0: f64) -> Result<Self> {
        let p = Self {
            s,
            s0,
            cs: 1.0,
            c0: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_constants(mut self, cs: f64, c0: f64) -> Result<Self> {
        self.cs = cs;
        self.c0 = c0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s0.is_nan() || self.s0 <= 3.5 {
            return Err(Error::param("s0", format!("s0 must exceed 3.5, got {}", self.s0)));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::param("s", format!("must be finite and >= 0, got {}", self.s)));
        }
        if !(self.cs > 0.0 && self.cs.is_finite()) {
            return Err(Error::param("cs", format!("must be positive, got {}", self.cs)));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::param("c0", format!("must be positive, got {}", self.c0)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambdas {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

impl Lambdas {
    /// Coefficient `(l1 l4 + 4 l3) / 32` of the quartic correction.
    pub fn quartic_coeff(&self) -> f64 {
        (self.l1 * self.l4 + 4.0 * self.l3) / 32.0
    }
}

pub fn lambdas(s: f64, c: &CoefficientSet) -> Lambdas {
    Lambdas {
        l1: (c.c1 - c.c4) * s - 0.5 * c.c1 + 2.0 * c.c2 + 0.5 * c.c4,
        l2: -2.0 * c.c3 * s - c.c4,
        l3: -2.0 * (c.c5 + c.c6 + c.c7) * s - 2.0 * c.c5 - c.c6,
        l4: 2.0 * (c.c1 - c.c4) * s - 5.0 * c.c1 + 4.0 * c.c2 + 5.0 * c.c4,
    }
}

/// The three correction terms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Corrections {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl Corrections {
    pub fn total(&self) -> f64 {
        self.m1 + self.m2 + self.m3
    }
}

/// Shared evaluator: `top` is `D^s w` (resp. `w`), `low` is `D^{s-1} w` (resp. `J w`).
fn corrections_from(f: &Field, top: &Field, low: &Field, lam: &Lambdas) -> Corrections {
    if lam.l1 == 0.0 && lam.l2 == 0.0 && lam.quartic_coeff() == 0.0 {
        return Corrections::default();
    }
    let lf = Lifted::new(f);
    let low2 = {
        let l = Lifted::new(low);
        l.mul(&l)
    };
    let m1 = if lam.l1 == 0.0 {
        0.0
    } else {
        let a = Lifted::new(&top.hilbert());
        let b = Lifted::new(&low.hilbert());
        0.25 * lam.l1 * lf.mul(&a).mul(&b).integral()
    };
    let m2 = if lam.l2 == 0.0 {
        0.0
    } else {
        let hfx = Lifted::new(&f.deriv(1).hilbert());
        0.25 * lam.l2 * hfx.mul(&low2).integral()
    };
    let q = lam.quartic_coeff();
    let m3 = if q == 0.0 {
        0.0
    } else {
        q * lf.mul(&lf).mul(&low2).integral()
    };
    Corrections { m1, m2, m3 }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "s",
            format!("H^s corrections need s >= 1 (use the L2 energy below that), got {s}"),
        ))
    }
}

pub fn corrections_hs(f: &Field, g: &Field, s: f64, c: &CoefficientSet) -> Result<Corrections> {
    check_s(s)?;
    f.check_same_grid(g)?;
    let w = f - g;
    Ok(corrections_from(
        f,
        &w.frac_deriv(s),
        &w.frac_deriv(s - 1.0),
        &lambdas(s, c),
    ))
}

pub fn corrections_l2(f: &Field, g: &Field, c: &CoefficientSet) -> Result<Corrections> {
    f.check_same_grid(g)?;
    let w = f - g;
    Ok(corrections_from(f, &w, &w.j_op(), &lambdas(0.0, c)))
}

/// Which of the two energies a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EnergyKind {
    Hs(f64),
    L2,
}

/// Pieces of an energy that do not depend on the weight constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    /// `||w||^2` for `E_s`, `||w||_{H^{-1}}^2` for `E`.
    pub weighted: f64,
    /// `||D^s w||^2` for `E_s`, `||w||^2` for `E`.
    pub plain: f64,
    /// `||f||^2 + ||f||^{4s}` (resp. `||f||^2 + ||f||^4`).
    pub growth: f64,
    pub corrections: Corrections,
}

impl EnergyParts {
    /// The norm-equivalent quantity the energy is compared against.
    pub fn comparison(&self, constant: f64) -> f64 {
        self.weighted * (1.0 + constant * self.growth) + self.plain
    }

    pub fn energy(&self, constant: f64) -> f64 {
        0.5 * self.comparison(constant) + self.corrections.total()
    }

    /// `E <= mid <= 4E`, as the two margins `mid - E` and `4E - mid`.
    pub fn sandwich_margins(&self, constant: f64) -> (f64, f64) {
        let mid = self.comparison(constant);
        let e = self.energy(constant);
        (mid - e, 4.0 * e - mid)
    }
}

pub fn energy_parts(f: &Field, g: &Field, kind: EnergyKind, c: &CoefficientSet) -> Result<EnergyParts> {
    f.check_same_grid(g)?;
    let w = f - g;
    let f2 = norm_l2(f).powi(2);
    match kind {
        EnergyKind::Hs(s) => {
            check_s(s)?;
            let dsw = w.frac_deriv(s);
            Ok(EnergyParts {
                weighted: norm_l2(&w).powi(2),
                plain: norm_l2(&dsw).powi(2),
                growth: f2 + f2.powf(2.0 * s),
                corrections: corrections_from(f, &dsw, &w.frac_deriv(s - 1.0), &lambdas(s, c)),
            })
        }
        EnergyKind::L2 => Ok(EnergyParts {
            weighted: norm_hneg1(&w).powi(2),
            plain: norm_l2(&w).powi(2),
            growth: f2 + f2 * f2,
            corrections: corrections_from(f, &w, &w.j_op(), &lambdas(0.0, c)),
        }),
    }
}

/// `E_s(f, g)` with constant `ep.cs`.
pub fn energy_hs(f: &Field, g: &Field, ep: &EnergyParams, c: &CoefficientSet) -> Result<f64> {
    Ok(energy_parts(f, g, EnergyKind::Hs(ep.s), c)?.energy(ep.cs))
}

/// `E(f, g)` with constant `ep.c0`.
pub fn energy_l2(f: &Field, g: &Field, ep: &EnergyParams, c: &CoefficientSet) -> Result<f64> {
    Ok(energy_parts(f, g, EnergyKind::L2, c)?.energy(ep.c0))
}

const CONSTANT_CAP_LOG2: i32 = 64;

/// Smallest power of two `C >= 1` for which both sandwich inequalities hold
/// on `(f, g)`.
pub fn choose_big_constant(f: &Field, g: &Field, kind: EnergyKind, c: &CoefficientSet) -> Result<f64> {
    let parts = energy_parts(f, g, kind, c)?;
    smallest_constant(&parts)
}

/// Same search on precomputed parts.
pub fn smallest_constant(parts: &EnergyParts) -> Result<f64> {
    for k in 0..=CONSTANT_CAP_LOG2 {
        let constant = 2f64.powi(k);
        let (lo, hi) = parts.sandwich_margins(constant);
        if lo >= 0.0 && hi >= 0.0 {
            return Ok(constant);
        }
    }
    Err(Error::ConstantCap)
}

/// `I_{s0}(f,g) = 1 + ||f||_{H^{s0}} + ||g||_{H^{s0}}`.
pub fn i_factor(f: &Field, g: &Field, s0: f64) -> f64 {
    1.0 + norm_hs(f, s0) + norm_hs(g, s0)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn lambda_values() {
        let z = lambdas(2.7, &CoefficientSet::ZERO);
        assert_eq!((z.l1, z.l2, z.l3, z.l4), (0.0, 0.0, 0.0, 0.0));
        let c = CoefficientSet::INTEGRABLE;
        for &s in &[0.0, 1.0, 2.5, 4.0] {
            let l = lambdas(s, &c);
            assert_eq!(l.l1, 4.0 * s + 2.0);
            assert_eq!(l.l2, 2.0 * s + 1.0);
            assert_eq!(l.l3, 12.0 * s + 6.0);
            assert_eq!(l.l4, 8.0 * s - 12.0);
        }
        let l = lambdas(1.0, &c);
        assert_eq!((l.l1, l.l2, l.l3, l.l4), (6.0, 3.0, 18.0, -4.0));
    }

    #[test]
    fn corrections_vanish_for_equal_fields_or_zero_coefficients() {
        let g = make_grid(32).unwrap();
        let f = Field::from_fn(g, |x| x.sin().exp()).truncate(8);
        let h = Field::cos_mode(g, 3, 0.2);
        let m = corrections_hs(&f, &f, 2.0, &CoefficientSet::INTEGRABLE).unwrap();
        assert_eq!(m, Corrections::default());
        let m = corrections_hs(&f, &h, 2.0, &CoefficientSet::ZERO).unwrap();
        assert_eq!(m, Corrections::default());
        assert!(corrections_hs(&f, &h, 0.5, &CoefficientSet::INTEGRABLE).is_err());
    }

    #[test]
    fn integrable_corrections_on_cos() {
        let g = make_grid(32).unwrap();
        let f = Field::cos_mode(g, 1, 1.0);
        let m = corrections_hs(&f, &Field::zeros(g), 1.0, &CoefficientSet::INTEGRABLE).unwrap();
        // oracle: trapezoid sums of the integrands on a fine uniform grid
        let n = 4096;
        let h = 2.0 * PI / n as f64;
        let quad = |phi: &dyn Fn(f64) -> f64| (0..n).map(|j| phi(j as f64 * h)).sum::<f64>() * h;
        let m1 = 1.5 * quad(&|x: f64| x.cos() * x.sin() * x.sin());
        let m2 = 0.75 * quad(&|x: f64| x.cos().powi(3));
        let m3 = 1.5 * quad(&|x: f64| x.cos().powi(4));
        assert!((m.m1 - m1).abs() < 1e-13);
        assert!((m.m2 - m2).abs() < 1e-13);
        assert!((m.m3 - m3).abs() < 1e-13);
        assert!((m.m3 - 9.0 * PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn linear_energies_on_cos() {
        let g = make_grid(32).unwrap();
        let f = Field::cos_mode(g, 1, 1.0);
        let z = Field::zeros(g);
        let ep = EnergyParams::new(1.0, 3.6).unwrap();
        let e = energy_hs(&f, &z, &ep, &CoefficientSet::ZERO).unwrap();
        // ||cos||^2 = pi and ||cos||^{4s} = pi^2 at s = 1
        let expect = 0.5 * PI * (1.0 + PI + PI * PI) + 0.5 * PI;
        assert!((e - expect).abs() < 1e-12);
        let e0 = energy_l2(&f, &z, &ep, &CoefficientSet::ZERO).unwrap();
        let expect0 = 0.5 * PI + 0.25 * PI * (1.0 + PI + PI * PI);
        assert!((e0 - expect0).abs() < 1e-12);
        assert_eq!(energy_hs(&f, &f, &ep, &CoefficientSet::INTEGRABLE).unwrap(), 0.0);
        assert_eq!(energy_l2(&f, &f, &ep, &CoefficientSet::INTEGRABLE).unwrap(), 0.0);
    }

    #[test]
    fn trivial_constant_selection() {
        let g = make_grid(32).unwrap();
        let f = Field::from_fn(g, |x| 2.0 * x.cos().exp()).truncate(10);
        let h = Field::sin_mode(g, 2, 0.7);
        for kind in [EnergyKind::Hs(4.0), EnergyKind::L2] {
            let c = choose_big_constant(&f, &f, kind, &CoefficientSet::INTEGRABLE).unwrap();
            assert_eq!(c, 1.0);
            let c = choose_big_constant(&f, &h, kind, &CoefficientSet::ZERO).unwrap();
            assert_eq!(c, 1.0);
        }
    }

    #[test]
    fn selected_constant_is_minimal_and_sandwiches() {
        let g = make_grid(64).unwrap();
        let f = Field::from_fn(g, |x| 1.5 * (x.sin()).exp() - 0.4 * (5.0 * x).cos()).truncate(12);
        let h = Field::cos_mode(g, 2, 0.3);
        let parts = energy_parts(&f, &h, EnergyKind::Hs(2.0), &CoefficientSet::INTEGRABLE).unwrap();
        let cst = smallest_constant(&parts).unwrap();
        let (lo, hi) = parts.sandwich_margins(cst);
        assert!(lo >= 0.0 && hi >= 0.0);
        if cst > 1.0 {
            let (lo, hi) = parts.sandwich_margins(cst / 2.0);
            assert!(lo < 0.0 || hi < 0.0);
        }
    }

    #[test]
    fn quartic_coefficient_is_quadratic_in_s() {
        let c = CoefficientSet::from_array([1.3, -0.7, 2.1, 0.4, -1.9, 0.6, 1.1, 0.8]);
        let q = |s: f64| lambdas(s, &c).quartic_coeff();
        // Lagrange interpolation through s = 0, 1, 2 reproduces every other s
        let (q0, q1, q2) = (q(0.0), q(1.0), q(2.0));
        for &s in &[-1.5, 0.5, 3.0, 7.25] {
            let p = q0 * (s - 1.0) * (s - 2.0) / 2.0 - q1 * s * (s - 2.0) + q2 * s * (s - 1.0) / 2.0;
            assert!((p - q(s)).abs() < 1e-11 * (1.0 + q(s).abs()));
        }
    }

    #[test]
    fn i_factor_values() {
        let g = make_grid(16).unwrap();
        let z = Field::zeros(g);
        let f = Field::cos_mode(g, 1, 1.0);
        assert_eq!(i_factor(&z, &z, 3.6), 1.0);
        assert!((i_factor(&f, &z, 3.6) - (1.0 + PI.sqrt())).abs() < 1e-14);
        let h = Field::sin_mode(g, 3, 0.2);
        assert_eq!(i_factor(&f, &h, 2.0), i_factor(&h, &f, 2.0));
    }

    #[test]
    fn parameter_checks() {
        assert!(EnergyParams::new(4.0, 3.5).is_err());
        assert!(EnergyParams::new(4.0, 3.6).is_ok());
        assert!(EnergyParams::new(4.0, 3.6).unwrap().with_constants(0.0, 1.0).is_err());
    }
}
