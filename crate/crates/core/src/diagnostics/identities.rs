//! Exact integration-by-parts identities, evaluated term by term.
//!
//! Every term is a trilinear integral of band-limited factors, computed on the
//! padded grid, so both sides agree to rounding. The residual is reported
//! relative to the largest `\int |a b c|` among the terms.

use serde::{Deserialize, Serialize};

use super::CheckReport;
use crate::error::{Error, Result};
use crate::spectral::{Field, Lifted};

/// Relative tolerance for the identity residuals.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityId {
    /// `<H d^4 f, gh> + <f H d^4 g, h> + <fg, H d^4 h>` rewritten with commutators
    /// and lower-order terms; fields `(f, g, h)`.
    Fourth,
    /// `<u D^s d^2 w, D^s w> = 1/2 <u'', (D^s w)^2> - <u, (D^s w')^2>`; fields `(u, w)`.
    SecondOrder,
    /// `<u D^s d^3 w, D^s w> = -<u' D^s d^2 w, D^s w> + 1/2 <u', (D^s w')^2>`; fields `(u, w)`.
    ThirdOrder,
    /// `<u, (H D^s w')^2>` split into a commutator part and the second-order identity;
    /// fields `(u, w)`.
    HilbertSquare,
}

impl IdentityId {
    pub const ALL: [IdentityId; 4] = [
        IdentityId::Fourth,
        IdentityId::SecondOrder,
        IdentityId::ThirdOrder,
        IdentityId::HilbertSquare,
    ];

    pub fn arity(self) -> usize {
        match self {
            IdentityId::Fourth => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Fourth => "fourth_order_symmetrization",
            IdentityId::SecondOrder => "second_order_reduction",
            IdentityId::ThirdOrder => "third_order_reduction",
            IdentityId::HilbertSquare => "hilbert_square_reduction",
        }
    }
}

/// A computed integral together with `\int |integrand|`.
#[derive(Clone, Copy)]
struct Term {
    value: f64,
    size: f64,
}

impl Term {
    fn of(l: &Lifted) -> Term {
        let abs_mean = l.values().iter().map(|v| v.abs()).sum::<f64>() / l.values().len() as f64;
        Term {
            value: l.integral(),
            size: 2.0 * std::f64::consts::PI * abs_mean,
        }
    }

    fn scaled(self, a: f64) -> Term {
        Term {
            value: a * self.value,
            size: a.abs() * self.size,
        }
    }
}

fn lift(f: &Field) -> Lifted {
    Lifted::new(f)
}

/// `\int a b c`.
fn tri(a: &Field, b: &Field, c: &Field) -> Term {
    Term::of(&lift(a).mul(&lift(b)).mul(&lift(c)))
}

/// `<H(a b), c>` with the Hilbert transform of the full product.
fn h_of_product(a: &Field, b: &Field, c: &Field) -> Term {
    Term::of(&lift(a).mul(&lift(b)).hilbert().mul(&lift(c)))
}

/// `<[H, a] b, c> = <H(a b), c> - <a H b, c>`.
fn commutator(a: &Field, b: &Field, c: &Field) -> Term {
    let x = h_of_product(a, b, c);
    let y = tri(a, &b.hilbert(), c);
    Term {
        value: x.value - y.value,
        size: x.size + y.size,
    }
}

fn compare(name: &str, lhs: &[Term], rhs: &[Term]) -> CheckReport {
    let l: f64 = lhs.iter().map(|t| t.value).sum();
    let r: f64 = rhs.iter().map(|t| t.value).sum();
    let scale = lhs
        .iter()
        .chain(rhs)
        .map(|t| t.size)
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    CheckReport::at_most(name, (l - r).abs() / scale, IDENTITY_TOL)
        .with_column("lhs", vec![l])
        .with_column("rhs", vec![r])
        .with_column("scale", vec![scale])
}

fn fourth(f: &Field, g: &Field, h: &Field) -> CheckReport {
    let h4 = |x: &Field| x.deriv(4).hilbert();
    let lhs = [tri(&h4(f), g, h), tri(f, &h4(g), h), tri(f, g, &h4(h))];
    let rhs = [
        commutator(h, &f.deriv(4), g).scaled(-1.0),
        commutator(f, &h.deriv(4), g).scaled(-1.0),
        tri(&f.deriv(3), &g.hilbert(), &h.deriv(1)).scaled(4.0),
        tri(&f.deriv(1), &g.deriv(1).hilbert(), &h.deriv(2)).scaled(-4.0),
        tri(&f.deriv(2), &g.hilbert(), &h.deriv(2)).scaled(2.0),
    ];
    compare(IdentityId::Fourth.name(), &lhs, &rhs)
}

fn second_order(u: &Field, w: &Field, s: f64) -> CheckReport {
    let dsw = w.frac_deriv(s);
    let dsw1 = w.deriv(1).frac_deriv(s);
    let lhs = [tri(u, &w.deriv(2).frac_deriv(s), &dsw)];
    let rhs = [
        tri(&u.deriv(2), &dsw, &dsw).scaled(0.5),
        tri(u, &dsw1, &dsw1).scaled(-1.0),
    ];
    compare(IdentityId::SecondOrder.name(), &lhs, &rhs)
}

fn third_order(u: &Field, w: &Field, s: f64) -> CheckReport {
    let dsw = w.frac_deriv(s);
    let dsw1 = w.deriv(1).frac_deriv(s);
    let lhs = [tri(u, &w.deriv(3).frac_deriv(s), &dsw)];
    let rhs = [
        tri(&u.deriv(1), &w.deriv(2).frac_deriv(s), &dsw).scaled(-1.0),
        tri(&u.deriv(1), &dsw1, &dsw1).scaled(0.5),
    ];
    compare(IdentityId::ThirdOrder.name(), &lhs, &rhs)
}

fn hilbert_square(u: &Field, w: &Field, s: f64) -> CheckReport {
    let dsw = w.frac_deriv(s);
    let dsw1 = w.deriv(1).frac_deriv(s);
    let hdsw1 = dsw1.hilbert();
    let hdsw2 = w.deriv(2).frac_deriv(s).hilbert();
    let lhs = [tri(u, &hdsw1, &hdsw1)];
    let rhs = [
        h_of_product(&u.deriv(1), &hdsw1, &dsw),
        commutator(u, &hdsw2, &dsw),
        tri(&u.deriv(2), &dsw, &dsw).scaled(-0.5),
        tri(u, &dsw1, &dsw1),
    ];
    compare(IdentityId::HilbertSquare.name(), &lhs, &rhs)
}

/// Residual of one catalog identity. `s` is ignored by [`IdentityId::Fourth`].
pub fn check_identity(id: IdentityId, fields: &[&Field], s: f64) -> Result<CheckReport> {
    if fields.len() != id.arity() {
        return Err(Error::Arity(format!(
            "{} takes {} fields, got {}",
            id.name(),
            id.arity(),
            fields.len()
        )));
    }
    for f in &fields[1..] {
        fields[0].check_same_grid(f)?;
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::param("s", format!("must be >= 0, got {s}")));
    }
    Ok(match id {
        IdentityId::Fourth => fourth(fields[0], fields[1], fields[2]),
        IdentityId::SecondOrder => second_order(fields[0], fields[1], s),
        IdentityId::ThirdOrder => third_order(fields[0], fields[1], s),
        IdentityId::HilbertSquare => hilbert_square(fields[0], fields[1], s),
    })
}
