//! Periodic grid on the torus `R / 2 pi Z`, real fields with a spectral view,
//! Fourier multipliers, dealiased products and Sobolev norms.
//!
//! Fourier convention: `f^(xi) = (2 pi)^{-1} \int f(x) e^{-i x xi} dx`, so on the
//! grid the coefficient of mode `xi` is `N^{-1} sum_j f(x_j) e^{-i xi x_j}` and
//! Parseval reads `||f||^2 = 2 pi sum |f^(xi)|^2`.
//!
//! Spectrum layout follows the FFT: index `j < N/2` holds `xi = j`, index `N/2`
//! holds the unmatched Nyquist mode `xi = N/2`, indices above hold `xi = j - N`.
//! Every multiplier and product zeroes the Nyquist mode.

mod fft;
mod multiplier;
mod norms;
mod product;
mod random;

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use multiplier::{apply_multiplier, psi, rho, Multiplier};
pub use norms::{inner, norm_hneg1, norm_hs, norm_l2};
pub(crate) use product::product_unchecked;
pub use product::{dealiased_product, integrate_product, Lifted, PAD_FACTOR};
pub use random::{random_field, seeded_field, RandomSpectrum};

/// Largest supported collocation count.
pub const MAX_POINTS: usize = 1 << 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform collocation grid on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    n: usize,
}

impl TorusGrid {
    /// `n_points` must be even and lie in `8..=2^20`.
    pub fn new(n_points: usize) -> Result<Self> {
        if !n_points.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "n_points must be even (even required), got {n_points}"
            )));
        }
        if !(8..=MAX_POINTS).contains(&n_points) {
            return Err(Error::Grid(format!(
                "n_points must lie in 8..={MAX_POINTS}, got {n_points}"
            )));
        }
        Ok(Self { n: n_points })
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        2.0 * PI
    }

    /// Highest mode retained by products and multipliers.
    pub fn k_max(&self) -> i64 {
        (self.n / 2) as i64 - 1
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Wavenumber stored at spectrum index `idx`.
    pub fn wavenumber(&self, idx: usize) -> i64 {
        let half = self.n / 2;
        if idx <= half {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Spectrum index of wavenumber `xi`, if representable (`-N/2 < xi <= N/2`).
    pub fn index(&self, xi: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if xi > half || xi <= -half {
            None
        } else if xi >= 0 {
            Some(xi as usize)
        } else {
            Some((xi + self.n as i64) as usize)
        }
    }

    pub(crate) fn nyquist_index(&self) -> usize {
        self.n / 2
    }
}

/// Real-valued function sampled on a [`TorusGrid`].
///
/// The spectrum is the primary representation; physical samples are
/// synthesized on first access and cached. Fields are immutable values.
#[derive(Clone)]
pub struct Field {
    grid: TorusGrid,
    spectrum: Vec<Complex64>,
    values: OnceLock<Vec<f64>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n_points", &self.grid.n)
            .field("mean", &self.mean())
            .field("l2", &norm_l2(self))
            .finish()
    }
}

impl Field {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self::from_raw_spectrum(grid, vec![ZERO; grid.n])
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        let mut spec = vec![ZERO; grid.n];
        spec[0] = Complex64::new(c, 0.0);
        Self::from_raw_spectrum(grid, spec)
    }

    /// Builds a field from physical samples. The Nyquist content is kept so
    /// that the physical/spectral round trip is exact.
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(values.len(), grid.n));
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf);
        let scale = 1.0 / grid.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        let cell = OnceLock::new();
        let _ = cell.set(values);
        Ok(Self {
            grid,
            spectrum: buf,
            values: cell,
        })
    }

    /// Samples `f` at the collocation nodes.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::from_values(grid, values).expect("length matches grid")
    }

    /// Builds a field from Fourier coefficients in FFT layout. The input is
    /// projected onto conjugate-symmetric spectra (real fields).
    pub fn from_spectrum(grid: TorusGrid, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.n {
            return Err(Error::GridMismatch(spectrum.len(), grid.n));
        }
        let n = grid.n;
        let mut sym = vec![ZERO; n];
        for idx in 0..n {
            let mirror = (n - idx) % n;
            sym[idx] = (spectrum[idx] + spectrum[mirror].conj()) * 0.5;
        }
        Ok(Self::from_raw_spectrum(grid, sym))
    }

    /// Sum of `amp * e^{i xi x} + c.c.` terms; `modes` lists `(xi, amp)` with `xi >= 0`.
    pub fn from_modes(grid: TorusGrid, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut spec = vec![ZERO; grid.n];
        for &(xi, amp) in modes {
            if xi < 0 || xi > grid.k_max() {
                return Err(Error::param(
                    "modes",
                    format!("wavenumber {xi} outside 0..={}", grid.k_max()),
                ));
            }
            if xi == 0 {
                spec[0] += Complex64::new(amp.re, 0.0);
            } else {
                spec[grid.index(xi).unwrap()] += amp;
                spec[grid.index(-xi).unwrap()] += amp.conj();
            }
        }
        Ok(Self::from_raw_spectrum(grid, spec))
    }

    /// `amp * cos(k x)`.
    pub fn cos_mode(grid: TorusGrid, k: i64, amp: f64) -> Self {
        if k == 0 {
            return Self::constant(grid, amp);
        }
        Self::from_modes(grid, &[(k, Complex64::new(0.5 * amp, 0.0))]).expect("mode in range")
    }

    /// `amp * sin(k x)`.
    pub fn sin_mode(grid: TorusGrid, k: i64, amp: f64) -> Self {
        if k == 0 {
            return Self::zeros(grid);
        }
        Self::from_modes(grid, &[(k, Complex64::new(0.0, -0.5 * amp))]).expect("mode in range")
    }

    pub(crate) fn from_raw_spectrum(grid: TorusGrid, spectrum: Vec<Complex64>) -> Self {
        debug_assert_eq!(spectrum.len(), grid.n);
        Self {
            grid,
            spectrum,
            values: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn into_spectrum(self) -> Vec<Complex64> {
        self.spectrum
    }

    /// Fourier coefficient of mode `xi` (zero when not representable).
    pub fn coeff(&self, xi: i64) -> Complex64 {
        self.grid.index(xi).map(|i| self.spectrum[i]).unwrap_or(ZERO)
    }

    /// The zero mode `f^(0)`, i.e. the spatial mean.
    pub fn mean(&self) -> f64 {
        self.spectrum[0].re
    }

    /// Physical samples at the collocation nodes.
    pub fn values(&self) -> &[f64] {
        self.values.get_or_init(|| {
            let mut buf = self.spectrum.clone();
            fft::inverse(&mut buf);
            buf.into_iter().map(|c| c.re).collect()
        })
    }

    pub fn is_finite(&self) -> bool {
        self.spectrum.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest absolute sample value.
    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Multiplies the spectrum pointwise by `symbol(xi)` and zeroes the Nyquist mode.
    pub fn map_symbol(&self, symbol: impl Fn(i64) -> Complex64) -> Field {
        let grid = self.grid;
        let nyq = grid.nyquist_index();
        let spec = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                if idx == nyq {
                    ZERO
                } else {
                    c * symbol(grid.wavenumber(idx))
                }
            })
            .collect();
        Field::from_raw_spectrum(grid, spec)
    }

    pub fn apply(&self, m: &Multiplier) -> Field {
        self.map_symbol(|xi| m.symbol(xi))
    }

    /// Hilbert transform `H`.
    pub fn hilbert(&self) -> Field {
        self.apply(&Multiplier::Hilbert)
    }

    /// `d^k / dx^k`.
    pub fn deriv(&self, k: u32) -> Field {
        self.apply(&Multiplier::Deriv(k))
    }

    /// `D^s` with symbol `|xi|^s` (`D^0` is the identity).
    pub fn frac_deriv(&self, s: f64) -> Field {
        self.apply(&Multiplier::FracDeriv(s))
    }

    /// `<D>^s` with symbol `(1 + xi^2)^{s/2}`.
    pub fn bessel(&self, s: f64) -> Field {
        self.apply(&Multiplier::BesselWeight(s))
    }

    /// Smoothed inverse derivative `J`.
    pub fn j_op(&self) -> Field {
        self.apply(&Multiplier::J)
    }

    /// Low-pass mollifier `L_eta`.
    pub fn mollify(&self, eta: f64) -> Field {
        self.apply(&Multiplier::Mollify(eta))
    }

    /// Drops the Nyquist mode and everything above `|xi| > cutoff`.
    pub fn truncate(&self, cutoff: i64) -> Field {
        self.map_symbol(|xi| {
            if xi.abs() <= cutoff {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Shift by a whole number of grid cells: `g(x) = f(x - shift * h)`.
    pub fn translate(&self, shift: isize) -> Field {
        let n = self.grid.n as isize;
        let v = self.values();
        let out = (0..n).map(|j| v[(j - shift).rem_euclid(n) as usize]).collect();
        Field::from_values(self.grid, out).expect("same grid")
    }

    /// Re-samples a band-limited field on another grid by copying modes
    /// `|xi| <= min(k_max, k_max')`.
    pub fn resample(&self, grid: TorusGrid) -> Field {
        let kmax = self.grid.k_max().min(grid.k_max());
        let mut spec = vec![ZERO; grid.n];
        for xi in -kmax..=kmax {
            spec[grid.index(xi).unwrap()] = self.coeff(xi);
        }
        Field::from_raw_spectrum(grid, spec)
    }

    pub fn scale(&self, a: f64) -> Field {
        let spec = self.spectrum.iter().map(|&c| c * a).collect();
        Field::from_raw_spectrum(self.grid, spec)
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: f64, other: &Field, b: f64) -> Field {
        assert_eq!(self.grid, other.grid, "grid mismatch in linear combination");
        let spec = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(&x, &y)| x * a + y * b)
            .collect();
        Field::from_raw_spectrum(self.grid, spec)
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid.n, other.grid.n));
        }
        Ok(())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.spectrum == other.spectrum
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.axpby(1.0, rhs, 1.0)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.axpby(1.0, rhs, -1.0)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, a: f64) -> Field {
        self.scale(a)
    }
}

/// Creates a grid; thin alias of [`TorusGrid::new`].
pub fn make_grid(n_points: usize) -> Result<TorusGrid> {
    TorusGrid::new(n_points)
}
