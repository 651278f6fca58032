use super::{check_vectors, AdditiveBounds};
use crate::algebra::Element;
use crate::certificate::{Certificate, Checks, TheoremId};
use crate::error::{Error, Result};
use crate::module::{ModuleVector, OrthoFamily};

/// Smallest admissible `M_jk = max(0, λ_max(‖x_j‖·1 − Re⟨e_k,x_j⟩))`.
pub fn extract_additive_bounds(family: &OrthoFamily, xs: &[ModuleVector]) -> Result<AdditiveBounds> {
    if family.is_empty() {
        return Err(Error::input("the family must contain at least one vector"));
    }
    check_vectors(family.space(), xs)?;
    let one = Element::identity(family.space().algebra());
    let m = xs
        .iter()
        .map(|x| {
            let n = x.norm();
            family
                .members()
                .iter()
                .map(|e| (&one.scale_real(n) - &e.inner(x).re_part()).lambda_max().max(0.0))
                .collect()
        })
        .collect();
    AdditiveBounds::new(m)
}

/// Verifies `Σ‖x_j‖ ≤ m^{-1/2}‖Σx_j‖ + m^{-1} Σ_j Σ_k M_jk` under `|e_k| ≤ 1`
/// and `‖x_j‖·1 − Re⟨e_k,x_j⟩ ≤ M_jk·1`.
///
/// When every `|e_k| = 1`, equality holds iff
/// `Σ‖x_j‖ ≥ m^{-1} Σ M_jk` and `Σx_j = (Σ‖x_j‖ − m^{-1} Σ M_jk) Σ_k e_k`;
/// both are checked and the second is the witness. Otherwise the equality
/// check is skipped with a note.
pub fn verify_additive(
    family: &OrthoFamily,
    xs: &[ModuleVector],
    b: &AdditiveBounds,
    tol: f64,
) -> Result<Certificate> {
    if family.is_empty() {
        return Err(Error::input("the family must contain at least one vector"));
    }
    check_vectors(family.space(), xs)?;
    let m = family.len();
    if b.m.len() != xs.len() || b.m.iter().any(|row| row.len() != m) {
        return Err(Error::input(format!("bounds must be a {}×{} matrix", xs.len(), m)));
    }
    let space = family.space();
    let one = Element::identity(space.algebra());
    let mut checks = Checks::new(tol);
    for (k, e) in family.members().iter().enumerate() {
        checks.loewner(format!("modulus_e_le_1[{k}]"), &e.gram(), &one)?;
    }
    let norms: Vec<f64> = xs.iter().map(ModuleVector::norm).collect();
    for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
        for (k, e) in family.members().iter().enumerate() {
            let defect = &one.scale_real(n) - &e.inner(x).re_part();
            checks.loewner(format!("defect_le_m[{j},{k}]"), &defect, &one.scale_real(b.m[j][k]))?;
        }
    }

    let mf = m as f64;
    let total: f64 = norms.iter().sum();
    let mean_m = b.total() / mf;
    let sum = ModuleVector::sum(space, xs);
    let lhs = total;
    let rhs = sum.norm() / mf.sqrt() + mean_m;
    let cert = Certificate::scalar(TheoremId::Additive, checks, lhs, rhs);
    if !family.has_unit_moduli() {
        return Ok(cert.note("some |e_k| ≠ 1: equality is not characterized"));
    }
    let e_sum = ModuleVector::sum(space, family.members());
    let witness = &sum - &e_sum.scale_real(total - mean_m);
    let mut cert = cert.with_witness(witness.norm(), total);
    let lower_ok = total - mean_m >= -tol * total.max(mean_m).max(1.0);
    cert.equality &= lower_ok;
    Ok(cert)
}

/// Equality instance `x_j = t_j Σ_k e_k` for a family with `|e_k| = 1`.
pub fn build_additive_equality_instance(family: &OrthoFamily, scales: &[f64]) -> Result<Vec<ModuleVector>> {
    if !family.has_unit_moduli() {
        return Err(Error::capability("additive equality instances need |e_k| = 1"));
    }
    if scales.is_empty() {
        return Err(Error::input("at least one scale is required"));
    }
    if let Some(t) = scales.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::input(format!("scales must be positive, got {t}")));
    }
    let e_sum = ModuleVector::sum(family.space(), family.members());
    Ok(scales.iter().map(|&t| e_sum.scale_real(t)).collect())
}
