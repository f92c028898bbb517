//! Time integration with the stiff linear part treated exactly.
//!
//! In Fourier variables the equation reads `u^' = L u^ + N(u)^` with
//! `L(xi) = -i sgn(xi) xi^4 - dir eps xi^4` and `N(u) = d_x(K(u) - H u_xxx)`.
//! Backward runs integrate the flipped-viscosity equation with a negative step,
//! which keeps the propagator contractive; recorded times are elapsed times.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy::{energy_parts, EnergyKind, EnergyParams};
use crate::equations::{nonlinear_part, CoefficientSet, SolverParams};
use crate::error::{Error, Result};
use crate::spectral::{norm_hs, norm_l2, Field, TorusGrid};

/// Growth of `||u||_{H^3}` over its initial value that is reported as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// Below this modulus the phi-functions are summed from their Taylor series.
const SERIES_RADIUS: f64 = 1.0;
const SERIES_TERMS: usize = 30;

pub fn linear_symbol(xi: i64, epsilon: f64, time_direction: f64) -> Complex64 {
    let x4 = (xi as f64).powi(4);
    Complex64::new(-time_direction * epsilon * x4, -(xi.signum() as f64) * x4)
}

/// `(phi_0, phi_1, phi_2, phi_3)` at `z`, where `phi_0 = e^z` and
/// `phi_{k+1}(z) = (phi_k(z) - 1/k!) / z`.
pub fn phi_functions(z: Complex64) -> [Complex64; 4] {
    if z.norm() < SERIES_RADIUS {
        phi_series(z)
    } else {
        phi_closed(z)
    }
}

/// `phi_k(z) = sum_j z^j / (j + k)!`.
fn phi_series(z: Complex64) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut term = Complex64::new(1.0, 0.0);
        for i in 1..=k {
            term /= i as f64;
        }
        let mut sum = term;
        for j in 1..SERIES_TERMS {
            term = term * z / (j + k) as f64;
            sum += term;
        }
        *slot = sum;
    }
    out
}

fn phi_closed(z: Complex64) -> [Complex64; 4] {
    let one = Complex64::new(1.0, 0.0);
    let e = z.exp();
    let p1 = (e - one) / z;
    let p2 = (p1 - one) / z;
    let p3 = (p2 - 0.5) / z;
    [e, p1, p2, p3]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    #[default]
    Etdrk4,
    Ifrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeStep {
    Fixed(f64),
    /// Chosen once from the initial data; `cfl` bounds the nonlinear gain per step.
    Auto {
        cfl: f64,
    },
}

impl Default for TimeStep {
    fn default() -> Self {
        TimeStep::Auto { cfl: 0.5 }
    }
}

/// Quantities recorded at every sample.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Monitor {
    /// Sobolev indices at which `||u||_{H^s}` is recorded.
    pub hs_indices: Vec<f64>,
    /// When set, `E_s(u, 0)` and `E(u, 0)` are recorded with these constants.
    pub energy: Option<(EnergyParams, CoefficientSet)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: TimeStep,
    pub t_end: f64,
    pub sample_every: usize,
    pub scheme: Scheme,
    pub monitor: Monitor,
}

impl StepperConfig {
    pub fn fixed(dt: f64, t_end: f64, sample_every: usize) -> Self {
        Self {
            dt: TimeStep::Fixed(dt),
            t_end,
            sample_every,
            scheme: Scheme::Etdrk4,
            monitor: Monitor::default(),
        }
    }

    pub fn auto(t_end: f64, sample_every: usize) -> Self {
        Self {
            dt: TimeStep::default(),
            ..Self::fixed(0.0, t_end, sample_every)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::param("sample_every", "must be at least 1"));
        }
        match self.dt {
            TimeStep::Fixed(dt) if !(dt > 0.0 && dt.is_finite()) => {
                Err(Error::param("dt", format!("must be positive, got {dt}")))
            }
            TimeStep::Auto { cfl } if !(cfl > 0.0 && cfl.is_finite()) => {
                Err(Error::param("cfl", format!("must be positive, got {cfl}")))
            }
            _ => Ok(()),
        }
    }
}

/// Per-mode coefficients for one step size.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: TorusGrid,
    coeffs: CoefficientSet,
    scheme: Scheme,
    /// Signed step actually taken (negative for backward runs).
    h: f64,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    /// `h/2 phi_1(z/2)` (ETDRK4) or unused.
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: TorusGrid, p: &SolverParams, dt: f64, scheme: Scheme) -> Result<Self> {
        p.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let dir = p.time_direction.sign();
        let h = dir * dt;
        let n = grid.n_points();
        let nyq = n / 2;
        let zero = Complex64::new(0.0, 0.0);
        let mut st = Self {
            grid,
            coeffs: p.coeffs,
            scheme,
            h,
            e: vec![zero; n],
            e2: vec![zero; n],
            q: vec![zero; n],
            f1: vec![zero; n],
            f2: vec![zero; n],
            f3: vec![zero; n],
        };
        for idx in 0..n {
            if idx == nyq {
                continue;
            }
            let z = linear_symbol(grid.wavenumber(idx), p.epsilon, dir) * h;
            let [e, p1, p2, p3] = phi_functions(z);
            st.e[idx] = e;
            st.e2[idx] = (z * 0.5).exp();
            if scheme == Scheme::Etdrk4 {
                let [_, ph1, _, _] = phi_functions(z * 0.5);
                st.q[idx] = ph1 * (0.5 * h);
                st.f1[idx] = (p1 - p2 * 3.0 + p3 * 4.0) * h;
                st.f2[idx] = (p2 - p3 * 2.0) * (2.0 * h);
                st.f3[idx] = (p3 * 4.0 - p2) * h;
            }
        }
        Ok(st)
    }

    pub fn dt(&self) -> f64 {
        self.h.abs()
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn nl(&self, spec: Vec<Complex64>) -> Vec<Complex64> {
        let u = Field::from_raw_spectrum(self.grid, spec);
        nonlinear_part(&u, &self.coeffs).into_spectrum()
    }

    pub fn step(&self, u: &Field) -> Field {
        assert_eq!(u.grid(), self.grid, "stepper used on a different grid");
        let v = u.spectrum();
        let n = v.len();
        let out = if self.coeffs == CoefficientSet::ZERO {
            (0..n).map(|i| self.e[i] * v[i]).collect()
        } else {
            match self.scheme {
                Scheme::Etdrk4 => self.etdrk4(v),
                Scheme::Ifrk4 => self.ifrk4(v),
            }
        };
        Field::from_raw_spectrum(self.grid, out)
    }

    fn etdrk4(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        let nv = self.nl(v.to_vec());
        let a: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + self.q[i] * nv[i]).collect();
        let na = self.nl(a.clone());
        let b: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + self.q[i] * na[i]).collect();
        let nb = self.nl(b);
        let c: Vec<Complex64> = (0..n)
            .map(|i| self.e2[i] * a[i] + self.q[i] * (nb[i] * 2.0 - nv[i]))
            .collect();
        let nc = self.nl(c);
        (0..n)
            .map(|i| self.e[i] * v[i] + self.f1[i] * nv[i] + self.f2[i] * (na[i] + nb[i]) + self.f3[i] * nc[i])
            .collect()
    }

    fn ifrk4(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        let h = self.h;
        let nv = self.nl(v.to_vec());
        let a: Vec<Complex64> = (0..n).map(|i| self.e2[i] * (v[i] + nv[i] * (0.5 * h))).collect();
        let na = self.nl(a);
        let b: Vec<Complex64> = (0..n).map(|i| self.e2[i] * v[i] + na[i] * (0.5 * h)).collect();
        let nb = self.nl(b);
        let c: Vec<Complex64> = (0..n).map(|i| self.e[i] * v[i] + self.e2[i] * nb[i] * h).collect();
        let nc = self.nl(c);
        (0..n)
            .map(|i| self.e[i] * v[i] + (self.e[i] * nv[i] + self.e2[i] * (na[i] + nb[i]) * 2.0 + nc[i]) * (h / 6.0))
            .collect()
    }
}

/// Rough linearized growth rate of `N` at wavenumber `k` around `u`.
fn nonlinear_rate(u: &Field, c: &CoefficientSet) -> impl Fn(f64) -> f64 {
    let u0 = u.max_abs();
    let u1 = u.deriv(1).max_abs();
    let u2 = u.deriv(2).max_abs();
    let (c1, c2, c3, c4) = (c.c1.abs(), c.c2.abs(), c.c3.abs(), c.c4.abs());
    let cub = c.c5.abs() + c.c6.abs() + c.c7.abs();
    let a3 = (c1 + c4) * u0;
    let a2 = 2.0 * (c2 + c3) * u1 + cub * u0 * u0;
    let a1 = (c1 + c4) * u2 + 2.0 * cub * u0 * u1 + 4.0 * c.c8.abs() * u0.powi(3);
    move |k| k * (a1 + k * (a2 + k * a3))
}

/// Step size for `TimeStep::Auto`: the largest `t_end / 2^j`-style value with
/// `dt k_max <= 1` and `max_k dt w(k) |phi_1(dt L(k))| <= cfl`, where `w` is a
/// linearized growth rate of the nonlinear term at `u0`. The result divides
/// `t_end` into a whole number of steps.
pub fn auto_dt(u0: &Field, p: &SolverParams, t_end: f64, cfl: f64) -> f64 {
    let grid = u0.grid();
    let kmax = grid.k_max();
    let rate = nonlinear_rate(u0, &p.coeffs);
    let dir = p.time_direction.sign();
    let gain = |dt: f64| {
        (1..=kmax)
            .map(|k| {
                let z = linear_symbol(k, p.epsilon, dir) * dt;
                dt * rate(k as f64) * phi_functions(z)[1].norm()
            })
            .fold(0.0_f64, f64::max)
    };
    let mut dt = t_end.min(1.0 / kmax as f64);
    while dt > 1e-14 && gain(dt) > cfl {
        dt *= 0.5;
    }
    let steps = (t_end / dt).ceil().max(1.0);
    t_end / steps
}

/// One step of the configured scheme. Prefer [`Stepper`] for repeated steps.
pub fn step(u: &Field, p: &SolverParams, cfg: &StepperConfig) -> Result<Field> {
    cfg.validate()?;
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto { cfl } => auto_dt(u, p, cfg.t_end, cfl),
    };
    let next = Stepper::new(u.grid(), p, dt, cfg.scheme)?.step(u);
    if !next.is_finite() {
        return Err(Error::NonFinite("time step"));
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RunStatus {
    Completed,
    /// Non-finite state or `H^3` growth beyond [`BLOWUP_FACTOR`] at this elapsed time.
    BlowUp(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    pub mass: f64,
    pub l2: f64,
    pub hs: Vec<f64>,
    pub energy_hs: Option<f64>,
    pub energy_l2: Option<f64>,
}

impl SampleDiagnostics {
    pub fn measure(u: &Field, monitor: &Monitor) -> Self {
        let (energy_hs, energy_l2) = match &monitor.energy {
            Some((ep, c)) => {
                let z = Field::zeros(u.grid());
                let es = if ep.s >= 1.0 {
                    energy_parts(u, &z, EnergyKind::Hs(ep.s), c)
                        .ok()
                        .map(|p| p.energy(ep.cs))
                } else {
                    None
                };
                let e0 = energy_parts(u, &z, EnergyKind::L2, c).ok().map(|p| p.energy(ep.c0));
                (es, e0)
            }
            None => (None, None),
        };
        Self {
            mass: u.mean(),
            l2: norm_l2(u),
            hs: monitor.hs_indices.iter().map(|&s| norm_hs(u, s)).collect(),
            energy_hs,
            energy_l2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
    pub diagnostics: Vec<SampleDiagnostics>,
    pub status: RunStatus,
    /// Step size used.
    pub dt: f64,
}

impl Trajectory {
    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("trajectory holds the initial sample")
    }

    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

pub fn evolve(u0: &Field, p: &SolverParams, cfg: &StepperConfig) -> Result<Trajectory> {
    cfg.validate()?;
    p.validate()?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial data"));
    }
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto { cfl } => auto_dt(u0, p, cfg.t_end, cfl),
    };
    let stepper = Stepper::new(u0.grid(), p, dt, cfg.scheme)?;
    let n_steps = ((cfg.t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let h3_0 = norm_hs(u0, 3.0);

    let mut traj = Trajectory {
        times: vec![0.0],
        snapshots: vec![u0.clone()],
        diagnostics: vec![SampleDiagnostics::measure(u0, &cfg.monitor)],
        status: RunStatus::Completed,
        dt,
    };
    let mut u = u0.clone();
    for k in 1..=n_steps {
        u = stepper.step(&u);
        let t = k as f64 * dt;
        let blown = !u.is_finite() || (h3_0 > 0.0 && norm_hs(&u, 3.0) > BLOWUP_FACTOR * h3_0);
        if blown {
            traj.status = RunStatus::BlowUp(t);
            break;
        }
        if k % cfg.sample_every == 0 || k == n_steps {
            traj.times.push(t);
            traj.diagnostics.push(SampleDiagnostics::measure(&u, &cfg.monitor));
            traj.snapshots.push(u.clone());
        }
    }
    Ok(traj)
}
