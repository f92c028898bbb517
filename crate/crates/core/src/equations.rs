//! The nonlinearity `K(u)`, its four-way split and the regularized right-hand side
//!
//! ```text
//! F1 = H u_xxx
//! F2 = c1 u u_xx + c2 u_x^2 + c3 (H u_x)^2 + c4 H(u H u_xx)
//! F3 = c5 H(u^2 u_x) + c6 u H(u u_x) + c7 u^2 H u_x
//! F4 = -c8 u^4
//! d_t u = d_x (F1 + F2 + F3 + F4) - dir eps d_x^4 u
//! ```
//!
//! Products are formed on the padded grid and Hilbert transforms of
//! intermediate products are taken there too, so the returned fields equal the
//! exact expressions truncated to `|xi| <= k_max`.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Field, Lifted};

/// Coefficients `c1..c7` of `K` plus the weight `c8` of the quartic term `-c8 u^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
}

impl CoefficientSet {
    /// Third member of the Benjamin-Ono hierarchy.
    pub const INTEGRABLE: CoefficientSet = CoefficientSet {
        c1: 3.0,
        c2: 2.0,
        c3: -1.0,
        c4: -1.0,
        c5: -2.0,
        c6: -2.0,
        c7: -2.0,
        c8: 1.0,
    };

    /// Linear equation: every nonlinear coefficient zero.
    pub const ZERO: CoefficientSet = CoefficientSet {
        c1: 0.0,
        c2: 0.0,
        c3: 0.0,
        c4: 0.0,
        c5: 0.0,
        c6: 0.0,
        c7: 0.0,
        c8: 0.0,
    };

    pub fn integrable() -> Self {
        Self::INTEGRABLE
    }

    pub fn zero() -> Self {
        Self::ZERO
    }

    pub fn from_array(c: [f64; 8]) -> Self {
        Self {
            c1: c[0],
            c2: c[1],
            c3: c[2],
            c4: c[3],
            c5: c[4],
            c6: c[5],
            c7: c[6],
            c8: c[7],
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7, self.c8]
    }

    pub fn validate(&self) -> Result<()> {
        if self.to_array().iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::param("coefficients", "all of c1..c8 must be finite"))
        }
    }
}

impl Default for CoefficientSet {
    fn default() -> Self {
        Self::INTEGRABLE
    }
}

impl Add for CoefficientSet {
    type Output = CoefficientSet;
    fn add(self, rhs: CoefficientSet) -> CoefficientSet {
        let (a, b) = (self.to_array(), rhs.to_array());
        CoefficientSet::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl Mul<f64> for CoefficientSet {
    type Output = CoefficientSet;
    fn mul(self, t: f64) -> CoefficientSet {
        CoefficientSet::from_array(self.to_array().map(|c| c * t))
    }
}

/// Sign in front of the viscous term. `Backward` flips `-eps d^4` to `+eps d^4`
/// so that stepping with negative time is well posed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TimeDirection {
    #[default]
    Forward,
    Backward,
}

impl TimeDirection {
    pub fn sign(self) -> f64 {
        match self {
            TimeDirection::Forward => 1.0,
            TimeDirection::Backward => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(TimeDirection::Forward),
            -1 => Ok(TimeDirection::Backward),
            other => Err(Error::param("time_direction", format!("must be 1 or -1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub coeffs: CoefficientSet,
    pub epsilon: f64,
    pub time_direction: TimeDirection,
}

impl SolverParams {
    pub fn new(coeffs: CoefficientSet, epsilon: f64) -> Result<Self> {
        let p = Self {
            coeffs,
            epsilon,
            time_direction: TimeDirection::Forward,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn reversed(mut self) -> Self {
        self.time_direction = match self.time_direction {
            TimeDirection::Forward => TimeDirection::Backward,
            TimeDirection::Backward => TimeDirection::Forward,
        };
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.coeffs.validate()?;
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::param(
                "epsilon",
                format!("must lie in [0, 1), got {}", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// The four components of `K(u)`.
#[derive(Debug, Clone)]
pub struct SplitK {
    pub f1: Field,
    pub f2: Field,
    pub f3: Field,
    pub f4: Field,
}

impl SplitK {
    pub fn sum(&self) -> Field {
        &(&(&self.f1 + &self.f2) + &self.f3) + &self.f4
    }
}

struct Lifts {
    u: Lifted,
    ux: Lifted,
    uxx: Lifted,
    hux: Lifted,
    huxx: Lifted,
}

impl Lifts {
    fn new(u: &Field) -> Self {
        let ux = u.deriv(1);
        let uxx = u.deriv(2);
        Self {
            u: Lifted::new(u),
            hux: Lifted::new(&ux.hilbert()),
            huxx: Lifted::new(&uxx.hilbert()),
            ux: Lifted::new(&ux),
            uxx: Lifted::new(&uxx),
        }
    }

    fn f2(&self, c: &CoefficientSet) -> Field {
        let mut local = self.u.mul(&self.uxx).scaled(c.c1);
        local.add_scaled(c.c2, &self.ux.mul(&self.ux));
        local.add_scaled(c.c3, &self.hux.mul(&self.hux));
        let nonlocal = self.u.mul(&self.huxx).scaled(c.c4).hilbert();
        local.add_scaled(1.0, &nonlocal);
        local.project()
    }

    fn f3(&self, c: &CoefficientSet) -> Field {
        let u2 = self.u.mul(&self.u);
        let mut acc = u2.mul(&self.ux).scaled(c.c5).hilbert();
        let h_uux = self.u.mul(&self.ux).hilbert();
        acc.add_scaled(c.c6, &self.u.mul(&h_uux));
        acc.add_scaled(c.c7, &u2.mul(&self.hux));
        acc.project()
    }

    fn f4(&self, c: &CoefficientSet) -> Field {
        let u2 = self.u.mul(&self.u);
        u2.mul(&u2).scaled(-c.c8).project()
    }
}

pub fn split_f(u: &Field, c: &CoefficientSet) -> SplitK {
    let lifts = Lifts::new(u);
    SplitK {
        f1: u.deriv(3).hilbert(),
        f2: lifts.f2(c),
        f3: lifts.f3(c),
        f4: lifts.f4(c),
    }
}

pub fn nonlinearity_k(u: &Field, c: &CoefficientSet) -> Field {
    split_f(u, c).sum()
}

/// `F2 + F3 + F4`, i.e. `K(u) - H u_xxx`, with a single projection.
pub fn nonlinear_flux(u: &Field, c: &CoefficientSet) -> Field {
    if *c == CoefficientSet::ZERO {
        return Field::zeros(u.grid());
    }
    let l = Lifts::new(u);
    let u2 = l.u.mul(&l.u);

    let mut local = l.u.mul(&l.uxx).scaled(c.c1);
    local.add_scaled(c.c2, &l.ux.mul(&l.ux));
    local.add_scaled(c.c3, &l.hux.mul(&l.hux));
    let h_uux = l.u.mul(&l.ux).hilbert();
    local.add_scaled(c.c6, &l.u.mul(&h_uux));
    local.add_scaled(c.c7, &u2.mul(&l.hux));
    local.add_scaled(-c.c8, &u2.mul(&u2));

    let mut inner = l.u.mul(&l.huxx).scaled(c.c4);
    inner.add_scaled(c.c5, &u2.mul(&l.ux));
    local.add_scaled(1.0, &inner.hilbert());
    local.project()
}

/// `d_x (F2 + F3 + F4)`: the part of the right-hand side left to the integrator.
pub fn nonlinear_part(u: &Field, c: &CoefficientSet) -> Field {
    nonlinear_flux(u, c).deriv(1)
}

/// `d_x K(u) - dir eps d_x^4 u`.
pub fn rhs(u: &Field, p: &SolverParams) -> Field {
    let k = &u.deriv(3).hilbert() + &nonlinear_flux(u, &p.coeffs);
    let visc = u.deriv(4);
    k.deriv(1).axpby(1.0, &visc, -p.time_direction.sign() * p.epsilon)
}
