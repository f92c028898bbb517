use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{Error, Result};

/// Fourier multipliers used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Multiplier {
    /// `-i sgn(xi)`, zero on the mean mode.
    Hilbert,
    /// `(i xi)^k`.
    Deriv(u32),
    /// `|xi|^s`; `s = 0` is the identity.
    FracDeriv(f64),
    /// `(1 + xi^2)^{s/2}`.
    BesselWeight(f64),
    /// `psi(xi) / |xi|`, zero at `xi = 0`.
    J,
    /// `rho(eta xi) = 1 - psi(eta xi)`.
    Mollify(f64),
}

/// Smooth cutoff: 0 on `|x| <= 1`, 1 on `|x| >= 2`, quintic smoothstep between.
pub fn psi(x: f64) -> f64 {
    let t = (x.abs() - 1.0).clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Bona-Smith profile `rho = 1 - psi`.
pub fn rho(x: f64) -> f64 {
    1.0 - psi(x)
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl Multiplier {
    pub fn symbol(&self, xi: i64) -> Complex64 {
        let x = xi as f64;
        match *self {
            Multiplier::Hilbert => Complex64::new(0.0, -(xi.signum() as f64)),
            Multiplier::Deriv(k) => i_pow(k) * x.powi(k as i32),
            Multiplier::FracDeriv(s) => {
                if s == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(x.abs().powf(s), 0.0)
                }
            }
            Multiplier::BesselWeight(s) => Complex64::new((1.0 + x * x).powf(0.5 * s), 0.0),
            Multiplier::J => {
                if xi == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(psi(x) / x.abs(), 0.0)
                }
            }
            Multiplier::Mollify(eta) => Complex64::new(rho(eta * x), 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Multiplier::FracDeriv(s) if !(s >= 0.0 && s.is_finite()) => {
                Err(Error::param("s", format!("fractional order must be >= 0, got {s}")))
            }
            Multiplier::BesselWeight(s) if !s.is_finite() => {
                Err(Error::param("s", "Bessel weight order must be finite"))
            }
            Multiplier::Mollify(eta) if !(eta > 0.0 && eta < 1.0) => {
                Err(Error::param("eta", format!("must lie in (0, 1), got {eta}")))
            }
            _ => Ok(()),
        }
    }
}

/// Checked multiplier application: rejects non-finite input and invalid parameters.
pub fn apply_multiplier(f: &Field, m: Multiplier) -> Result<Field> {
    m.validate()?;
    if !f.is_finite() {
        return Err(Error::NonFinite("apply_multiplier input"));
    }
    Ok(f.apply(&m))
}
