//! Cauchy–Schwarz inequality, its equality case, and the Bessel-type bound.

use serde::{Deserialize, Serialize};

use super::{OrthoFamily, ModuleVector};
use crate::algebra::Element;
use crate::certificate::{Certificate, Checks, TheoremId};
use crate::error::{Error, Result};

/// `⟨y,x⟩⟨x,y⟩ ≤ ‖x‖²⟨y,y⟩`; the certificate slack is `λ_min` of the difference.
pub fn cs_gap(x: &ModuleVector, y: &ModuleVector, tol: f64) -> Result<Certificate> {
    if x.space() != y.space() {
        return Err(Error::input("Cauchy–Schwarz on vectors from different modules"));
    }
    let xy = x.inner(y);
    let lhs = &xy.adjoint() * &xy;
    let rhs = y.gram().scale_real(x.norm().powi(2));
    Ok(Certificate::operator(TheoremId::CauchySchwarz, Checks::new(tol), &lhs, &rhs))
}

/// Equality case of Cauchy–Schwarz: if `|⟨x,y⟩| = ‖x‖‖y‖·1` then
/// `y = x·⟨x,y⟩/‖x‖²`. Returns that reconstruction.
///
/// The hypothesis is accepted when `‖|⟨x,y⟩| − ‖x‖‖y‖·1‖ ≤ tol·max(1, ‖x‖‖y‖)`.
pub fn cs_equality_reconstruct(x: &ModuleVector, y: &ModuleVector, tol: f64) -> Result<ModuleVector> {
    if x.space() != y.space() {
        return Err(Error::input("reconstruction from vectors of different modules"));
    }
    let nx = x.norm();
    if nx == 0.0 {
        return Err(Error::input("reconstruction needs x ≠ 0"));
    }
    let xy = x.inner(y);
    let target = nx * y.norm();
    let deviation = (&xy.abs() - &Element::real_scalar(xy.shape(), target)).op_norm();
    if deviation > tol * target.max(1.0) {
        return Err(Error::Hypothesis {
            hypothesis: "|⟨x,y⟩| = ‖x‖‖y‖".into(),
            deviation,
        });
    }
    Ok(x.right_mul(&xy.scale_real(1.0 / (nx * nx))))
}

/// Which inner products enter the Bessel-type bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselSide {
    /// `Σ_k |⟨e_k, x⟩|² ≤ |x|²`.
    Right,
    /// `Σ_k |⟨x, e_k⟩|² ≤ |x|²`; needs a two-sided module.
    Left,
}

/// Certifies the Bessel-type bound; the slack is `λ_min` of the defect
/// `|x|² − Σ_k |·|²`.
pub fn bessel_defect(x: &ModuleVector, family: &OrthoFamily, side: BesselSide, tol: f64) -> Result<Certificate> {
    if x.space() != family.space() {
        return Err(Error::input("Bessel bound with vector and family from different modules"));
    }
    if side == BesselSide::Left && !x.space().is_two_sided() {
        return Err(Error::capability(
            "the left Bessel bound needs a two-sided module (commutative algebra)",
        ));
    }
    let mut lhs = Element::zeros(x.space().algebra());
    for e in family.members() {
        let c = match side {
            BesselSide::Right => e.inner(x),
            BesselSide::Left => x.inner(e),
        };
        lhs = lhs + &c.adjoint() * &c;
    }
    let rhs = x.gram();
    Ok(Certificate::operator(TheoremId::Bessel, Checks::new(tol), &lhs, &rhs).with_slack_equality())
}
