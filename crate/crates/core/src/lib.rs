//! Pseudo-spectral simulation of fourth-order Benjamin-Ono type equations
//!
//! ```text
//! d_t u = d_x K(u) - eps d_x^4 u,   x in T = R / 2 pi Z,
//! K(u) = H d_x^3 u + c1 u u_xx + c2 u_x^2 + c3 (H u_x)^2 + c4 H(u H u_xx)
//!      + c5 H(u^2 u_x) + c6 u H(u u_x) + c7 u^2 H u_x - c8 u^4
//! ```
//!
//! together with the modified energies used to control it and numerical checks
//! of the identities, commutator bounds and symbol inequalities behind them.

pub mod diagnostics;
pub mod energy;
pub mod equations;
pub mod error;
pub mod evolve;
pub mod spectral;

pub use diagnostics::CheckReport;
pub use energy::{EnergyParams, Lambdas};
pub use equations::{CoefficientSet, SolverParams, TimeDirection};
pub use error::{Error, Result};
pub use evolve::{RunStatus, Scheme, StepperConfig, TimeStep, Trajectory};
pub use spectral::{Field, Multiplier, TorusGrid};
