use num_complex::Complex64;

use super::{check_vectors, min_ratio, nonzero_norms, FamilyBounds};
use crate::algebra::Element;
use crate::certificate::{Certificate, Checks, TheoremId};
use crate::error::{Error, Result};
use crate::module::{ModuleVector, OrthoFamily};

fn check_family(family: &OrthoFamily, xs: &[ModuleVector], b: Option<&FamilyBounds>) -> Result<()> {
    if family.is_empty() {
        return Err(Error::input("the family must contain at least one vector"));
    }
    check_vectors(family.space(), xs)?;
    if let Some(b) = b {
        if b.len() != family.len() {
            return Err(Error::input(format!(
                "bounds have {} entries but the family has {} members",
                b.len(),
                family.len()
            )));
        }
    }
    Ok(())
}

/// `c²n ≤ c·h`, checked as `cn ≤ h` for `c > 0` and `h ≤ cn` for `c < 0`.
fn signed_lower(checks: &mut Checks, name: String, one: &Element, c: f64, n: f64, h: &Element) -> Result<bool> {
    let cn = one.scale_real(c * n);
    if c > 0.0 {
        checks.loewner(name, &cn, h)
    } else if c < 0.0 {
        checks.loewner(name, h, &cn)
    } else {
        Ok(checks.scalar_leq(name, 0.0, 0.0))
    }
}

/// `v = Σ_k (r_k + iρ_k) e_k`.
fn combination(family: &OrthoFamily, b: &FamilyBounds) -> ModuleVector {
    let terms = family
        .members()
        .iter()
        .zip(b.r.iter().zip(&b.rho))
        .map(|(e, (&r, &rho))| e.scale(Complex64::new(r, rho)));
    terms.fold(ModuleVector::zeros(family.space()), |acc, t| acc + t)
}

/// `r_k = max(0, min_j λ_min(Re⟨e_k,x_j⟩)/‖x_j‖)` and `ρ_k` likewise with
/// imaginary parts. These satisfy the hypotheses of both family theorems.
pub fn extract_family_bounds(family: &OrthoFamily, xs: &[ModuleVector]) -> Result<FamilyBounds> {
    check_family(family, xs, None)?;
    let norms = nonzero_norms(xs)?;
    let (r, rho) = family
        .members()
        .iter()
        .map(|e| {
            let (re, im): (Vec<Element>, Vec<Element>) = xs.iter().map(|x| e.inner(x).re_im_parts()).unzip();
            (min_ratio(&re, &norms), min_ratio(&im, &norms))
        })
        .unzip();
    FamilyBounds::new(r, rho)
}

/// Verifies `[Σ_k (r_k² + ρ_k²)]^{1/2} Σ‖x_j‖ ≤ ‖Σx_j‖` under the literal
/// hypotheses `0 ≤ r_k²‖x_j‖ ≤ Re⟨r_k e_k, x_j⟩` and
/// `0 ≤ ρ_k²‖x_j‖ ≤ Im⟨ρ_k e_k, x_j⟩`.
///
/// The equality witness is `Σx_j = (Σ‖x_j‖) Σ_k (r_k + iρ_k) e_k`. It
/// characterizes equality only for strict families; for other families the
/// witness is still reported but a note records that the converse may fail.
pub fn verify_family_norm(
    family: &OrthoFamily,
    xs: &[ModuleVector],
    b: &FamilyBounds,
    tol: f64,
) -> Result<Certificate> {
    check_family(family, xs, Some(b))?;
    let space = family.space();
    let one = Element::identity(space.algebra());
    let mut checks = Checks::new(tol);
    let norms: Vec<f64> = xs.iter().map(ModuleVector::norm).collect();
    for (k, e) in family.members().iter().enumerate() {
        let (r, rho) = (b.r[k], b.rho[k]);
        for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
            let (re, im) = e.inner(x).re_im_parts();
            signed_lower(&mut checks, format!("re_lower[{j},{k}]"), &one, r, n, &re)?;
            signed_lower(&mut checks, format!("im_lower[{j},{k}]"), &one, rho, n, &im)?;
        }
    }

    let total: f64 = norms.iter().sum();
    let sum = ModuleVector::sum(space, xs);
    let lhs = b.square_sum().sqrt() * total;
    let witness = &sum - &combination(family, b).scale_real(total);
    let cert = Certificate::scalar(TheoremId::FamilyNorm, checks, lhs, sum.norm()).with_witness(witness.norm(), total);
    Ok(if family.is_strict() {
        cert
    } else {
        cert.note("non-strict family: equality is certified only in the witness direction")
    })
}

/// Equality instance `x_j = t_j v` with `v = Σ_k (r_k + iρ_k) e_k` for a
/// strict family and `Σ_k (r_k² + ρ_k²) = 1`, so that `‖x_j‖ = t_j`.
pub fn build_equality_instance(family: &OrthoFamily, b: &FamilyBounds, norms: &[f64]) -> Result<Vec<ModuleVector>> {
    if !family.is_strict() {
        return Err(Error::capability("equality instances need a strict family"));
    }
    check_family(family, &[ModuleVector::zeros(family.space())], Some(b))?;
    let s = b.square_sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::input(format!("Σ(r_k² + ρ_k²) = {s}, expected 1")));
    }
    if norms.is_empty() {
        return Err(Error::input("at least one norm is required"));
    }
    if let Some(t) = norms.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::input(format!("norms must be positive, got {t}")));
    }
    let v = combination(family, b);
    Ok(norms.iter().map(|&t| v.scale_real(t)).collect())
}

/// Verifies `[Σ_k (r_k² + ρ_k²)]^{1/2} (Σ‖x_j‖)·1 ≤ |Σx_j|` in a two-sided
/// module, under `r_k, ρ_k ≥ 0`, `r_k‖x_j‖ ≤ Re⟨e_k,x_j⟩` and
/// `ρ_k‖x_j‖ ≤ Im⟨e_k,x_j⟩`.
///
/// Equality is certified only for strict families, through the witness
/// `Σx_j = (Σ‖x_j‖) Σ_k (r_k + iρ_k) e_k`.
pub fn verify_family_modulus(
    family: &OrthoFamily,
    xs: &[ModuleVector],
    b: &FamilyBounds,
    tol: f64,
) -> Result<Certificate> {
    check_family(family, xs, Some(b))?;
    let space = family.space();
    if !space.is_two_sided() {
        return Err(Error::capability(
            "the modulus-valued inequality needs a two-sided module (commutative algebra)",
        ));
    }
    let one = Element::identity(space.algebra());
    let mut checks = Checks::new(tol);
    for (k, (&r, &rho)) in b.r.iter().zip(&b.rho).enumerate() {
        checks.flag(format!("r_nonneg[{k}]"), r >= 0.0, r);
        checks.flag(format!("rho_nonneg[{k}]"), rho >= 0.0, rho);
    }
    let norms: Vec<f64> = xs.iter().map(ModuleVector::norm).collect();
    for (k, e) in family.members().iter().enumerate() {
        for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
            let (re, im) = e.inner(x).re_im_parts();
            checks.loewner(format!("re_lower[{j},{k}]"), &one.scale_real(b.r[k] * n), &re)?;
            checks.loewner(format!("im_lower[{j},{k}]"), &one.scale_real(b.rho[k] * n), &im)?;
        }
    }

    let total: f64 = norms.iter().sum();
    let sum = ModuleVector::sum(space, xs);
    let lhs = one.scale_real(b.square_sum().sqrt() * total);
    let rhs = sum.modulus()?;
    let cert = Certificate::operator(TheoremId::FamilyModulus, checks, &lhs, &rhs);
    if family.is_strict() {
        let witness = &sum - &combination(family, b).scale_real(total);
        Ok(cert.with_witness(witness.norm(), total))
    } else {
        Ok(cert.note("non-strict family: equality is not certified"))
    }
}
