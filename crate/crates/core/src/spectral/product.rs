//! Dealiased pointwise products.
//!
//! Band-limited factors (`|xi| <= k_max`) are synthesized on a grid three
//! times finer, multiplied there and truncated back. For `p` factors the
//! product is exact on the retained band whenever `(p + 1) k_max < 3N`, which
//! covers the quartic nonlinearity; integrals of products are exact up to five
//! factors.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{fft, Field, TorusGrid};
use crate::error::{Error, Result};

/// Zero-padding factor used for every product.
pub const PAD_FACTOR: usize = 3;

/// A field synthesized on the padded grid of `PAD_FACTOR * N` points.
#[derive(Debug, Clone)]
pub struct Lifted {
    grid: TorusGrid,
    values: Vec<f64>,
}

fn fine_index(m: usize, xi: i64) -> usize {
    if xi >= 0 {
        xi as usize
    } else {
        (xi + m as i64) as usize
    }
}

impl Lifted {
    pub fn new(f: &Field) -> Self {
        let grid = f.grid();
        let m = PAD_FACTOR * grid.n_points();
        let kmax = grid.k_max();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for xi in -kmax..=kmax {
            buf[fine_index(m, xi)] = f.coeff(xi);
        }
        fft::inverse(&mut buf);
        Self {
            grid,
            values: buf.into_iter().map(|c| c.re).collect(),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Lifted) -> Lifted {
        assert_eq!(self.grid, other.grid, "grid mismatch in lifted product");
        Lifted {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// `self += a * other`, pointwise.
    pub fn add_scaled(&mut self, a: f64, other: &Lifted) {
        assert_eq!(self.grid, other.grid, "grid mismatch in lifted sum");
        self.values.iter_mut().zip(&other.values).for_each(|(x, y)| *x += a * y);
    }

    pub fn scaled(&self, a: f64) -> Lifted {
        Lifted {
            grid: self.grid,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    /// Hilbert transform on the padded grid. Exact for products of up to
    /// three band-limited factors, whose spectra still fit the padded band.
    pub fn hilbert(&self) -> Lifted {
        let m = self.values.len();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf);
        let half = m / 2;
        let scale = 1.0 / m as f64;
        for (idx, c) in buf.iter_mut().enumerate() {
            *c = if idx == 0 || idx == half {
                Complex64::new(0.0, 0.0)
            } else if idx < half {
                Complex64::new(c.im, -c.re) * scale
            } else {
                Complex64::new(-c.im, c.re) * scale
            };
        }
        fft::inverse(&mut buf);
        Lifted {
            grid: self.grid,
            values: buf.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Back to the coarse grid, keeping `|xi| <= k_max`.
    pub fn project(&self) -> Field {
        let grid = self.grid;
        let m = self.values.len();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf);
        let scale = 1.0 / m as f64;
        let kmax = grid.k_max();
        let mut spec = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        for xi in -kmax..=kmax {
            spec[grid.index(xi).unwrap()] = buf[fine_index(m, xi)] * scale;
        }
        spec[0].im = 0.0;
        Field::from_raw_spectrum(grid, spec)
    }

    /// `\int_T` of the lifted function (exact trapezoid on the fine grid).
    pub fn integral(&self) -> f64 {
        2.0 * PI * self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn check_grids(fs: &[&Field]) -> Result<()> {
    let first = fs[0];
    for f in &fs[1..] {
        first.check_same_grid(f)?;
    }
    Ok(())
}

/// Dealiased product of 2 to 4 fields sharing a grid.
pub fn dealiased_product(fs: &[&Field]) -> Result<Field> {
    if !(2..=4).contains(&fs.len()) {
        return Err(Error::Arity(format!(
            "dealiased_product takes 2..=4 fields, got {}",
            fs.len()
        )));
    }
    check_grids(fs)?;
    Ok(product_unchecked(fs))
}

pub(crate) fn product_unchecked(fs: &[&Field]) -> Field {
    let mut acc = Lifted::new(fs[0]);
    for f in &fs[1..] {
        acc = acc.mul(&Lifted::new(f));
    }
    acc.project()
}

/// `\int_T f_1 ... f_p dx` for 1 to 5 band-limited factors, exact.
pub fn integrate_product(fs: &[&Field]) -> Result<f64> {
    if !(1..=5).contains(&fs.len()) {
        return Err(Error::Arity(format!(
            "integrate_product takes 1..=5 fields, got {}",
            fs.len()
        )));
    }
    check_grids(fs)?;
    Ok(integral_unchecked(fs))
}

pub(crate) fn integral_unchecked(fs: &[&Field]) -> f64 {
    match fs.len() {
        1 => 2.0 * PI * fs[0].mean(),
        2 => super::inner(fs[0], fs[1]),
        _ => {
            let mut acc = Lifted::new(fs[0]);
            for f in &fs[1..] {
                acc = acc.mul(&Lifted::new(f));
            }
            acc.integral()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn cos_squared_has_no_aliasing() {
        let g = make_grid(16).unwrap();
        let c = Field::cos_mode(g, 1, 1.0);
        let p = dealiased_product(&[&c, &c]).unwrap();
        let expect = &Field::constant(g, 0.5) + &Field::cos_mode(g, 2, 0.5);
        for xi in -8..=8 {
            assert!((p.coeff(xi) - expect.coeff(xi)).norm() < 1e-16);
        }
    }

    #[test]
    fn top_mode_square_matches_four_times_finer_grid() {
        let g = make_grid(32).unwrap();
        let k = g.k_max();
        let c = Field::cos_mode(g, k, 1.0);
        let p = dealiased_product(&[&c, &c]).unwrap();

        // oracle: multiply on a 4x grid in physical space, then read the modes
        let fine = make_grid(128).unwrap();
        let cf = c.resample(fine);
        let vals: Vec<f64> = cf.values().iter().map(|v| v * v).collect();
        let oracle = Field::from_values(fine, vals).unwrap();
        for xi in -k..=k {
            assert!((p.coeff(xi) - oracle.coeff(xi)).norm() < 1e-15, "mode {xi}");
        }
        assert!((p.mean() - 0.5).abs() < 1e-15);
        for xi in 1..=k {
            assert!(p.coeff(xi).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_one_is_an_identity_factor() {
        let g = make_grid(32).unwrap();
        let f = Field::from_fn(g, |x| (x.sin()).exp()).truncate(6);
        let h = Field::cos_mode(g, 3, 0.4);
        let k = Field::sin_mode(g, 2, 1.1);
        let one = Field::constant(g, 1.0);
        let a = dealiased_product(&[&one, &f, &h, &k]).unwrap();
        let b = dealiased_product(&[&f, &h, &k]).unwrap();
        for xi in -15..=15 {
            assert!((a.coeff(xi) - b.coeff(xi)).norm() < 1e-15);
        }
    }

    #[test]
    fn arity_and_grid_errors() {
        let g = make_grid(16).unwrap();
        let g2 = make_grid(32).unwrap();
        let f = Field::cos_mode(g, 1, 1.0);
        assert!(matches!(dealiased_product(&[&f]), Err(Error::Arity(_))));
        assert!(matches!(dealiased_product(&[&f, &f, &f, &f, &f]), Err(Error::Arity(_))));
        let h = Field::cos_mode(g2, 1, 1.0);
        assert_eq!(dealiased_product(&[&f, &h]).unwrap_err(), Error::GridMismatch(16, 32));
    }

    #[test]
    fn fine_hilbert_keeps_the_full_product_band() {
        // H(cos(k x)^2) = sin(2k x) / 2 even when 2k exceeds k_max
        let g = make_grid(16).unwrap();
        let c = Lifted::new(&Field::cos_mode(g, 6, 1.0));
        let h = c.mul(&c).hilbert();
        let m = h.values().len();
        for (j, v) in h.values().iter().enumerate() {
            let x = 2.0 * PI * j as f64 / m as f64;
            assert!((v - 0.5 * (12.0 * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn quartic_integral_is_exact() {
        // \int cos^4 = 3 pi / 4 ; \int cos(kx)^4 with k = k_max still exact
        let g = make_grid(16).unwrap();
        let c = Field::cos_mode(g, 1, 1.0);
        let v = integrate_product(&[&c, &c, &c, &c]).unwrap();
        assert!((v - 0.75 * PI).abs() < 1e-14);
        let top = Field::cos_mode(g, 7, 1.0);
        let v = integrate_product(&[&top, &top, &top, &top]).unwrap();
        assert!((v - 0.75 * PI).abs() < 1e-13);
    }
}
