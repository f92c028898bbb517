//! Numerical checks: exact identities, commutator and symbol bounds,
//! interpolation and mollifier rates, and the evolution experiments.

pub mod commutators;
pub mod experiments;
pub mod fit;
pub mod gn;
pub mod identities;
pub mod mollifier;
pub mod operators;
mod report;
pub mod sandwich;
pub mod symbols;

pub use commutators::{commutator_bound_check, commutator_residual};
pub use identities::{check_identity, IdentityId};
pub use report::{CheckReport, Table};
pub use symbols::{symbol_scan, InequalityId, SymbolScanSpec};
