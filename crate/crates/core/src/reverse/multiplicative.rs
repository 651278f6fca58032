use num_complex::Complex64;

use super::{check_vectors, min_ratio, nonzero_norms, HermitianBounds, ScalarBounds};
use crate::algebra::{loewner_compare, Element, DEFAULT_TOL, HERMITIAN_TOL};
use crate::certificate::{Certificate, Checks, ScalarReading, TheoremId};
use crate::error::{Error, Result};
use crate::module::ModuleVector;

fn require_modulus_le_one(e: &ModuleVector, tol: f64) -> Result<()> {
    let one = Element::identity(e.space().algebra());
    let chk = loewner_compare(&e.gram(), &one, tol)?;
    if chk.holds {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            hypothesis: "|e| ≤ 1".into(),
            deviation: -chk.gap,
        })
    }
}

/// Largest `k₁, k₂ ≥ 0` with `k₁‖x_j‖ ≤ Re⟨e,x_j⟩` and `k₂‖x_j‖ ≤ Im⟨e,x_j⟩`
/// for every `j`.
pub fn extract_scalar_bounds(e: &ModuleVector, xs: &[ModuleVector]) -> Result<ScalarBounds> {
    check_vectors(e.space(), xs)?;
    require_modulus_le_one(e, DEFAULT_TOL)?;
    let norms = nonzero_norms(xs)?;
    let (re, im): (Vec<Element>, Vec<Element>) = xs.iter().map(|x| e.inner(x).re_im_parts()).unzip();
    Ok(ScalarBounds {
        k1: min_ratio(&re, &norms),
        k2: min_ratio(&im, &norms),
    })
}

/// Verifies `(k₁² + k₂²)^{1/2} Σ‖x_j‖ ≤ ‖Σx_j‖` under `|e| ≤ 1` and
/// `0 ≤ k₁‖x_j‖ ≤ Re⟨e,x_j⟩`, `0 ≤ k₂‖x_j‖ ≤ Im⟨e,x_j⟩`.
///
/// With `k₂ = 0` on the scalar algebra this is the Diaz–Metcalf inequality.
/// The equality witness is `Σx_j = (Σ‖x_j‖)(k₁ + ik₂)e`.
pub fn verify_multiplicative_scalar(
    e: &ModuleVector,
    xs: &[ModuleVector],
    b: ScalarBounds,
    tol: f64,
) -> Result<Certificate> {
    check_vectors(e.space(), xs)?;
    let space = e.space();
    let one = Element::identity(space.algebra());
    let mut checks = Checks::new(tol);
    checks.loewner("modulus_e_le_1", &e.gram(), &one)?;
    checks.flag("k1_nonneg", b.k1 >= 0.0, b.k1);
    checks.flag("k2_nonneg", b.k2 >= 0.0, b.k2);

    let norms: Vec<f64> = xs.iter().map(ModuleVector::norm).collect();
    for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
        let (re, im) = e.inner(x).re_im_parts();
        checks.loewner(format!("re_lower[{j}]"), &one.scale_real(b.k1 * n), &re)?;
        checks.loewner(format!("im_lower[{j}]"), &one.scale_real(b.k2 * n), &im)?;
    }

    let total: f64 = norms.iter().sum();
    let sum = ModuleVector::sum(space, xs);
    let lhs = b.magnitude() * total;
    let rhs = sum.norm();
    let witness = &sum - &e.scale(Complex64::new(b.k1, b.k2) * total);
    let mut cert = Certificate::scalar(TheoremId::MultScalar, checks, lhs, rhs).with_witness(witness.norm(), total);
    if (&e.gram() - &one).op_norm() > crate::module::FAMILY_TOL {
        cert = cert.note("⟨e,e⟩ ≠ 1: the witness form of the equality case is not guaranteed");
    }
    Ok(cert)
}

/// Hermitian constants for which the hermitian-bounds verifier's hypotheses
/// hold by construction.
///
/// When the real parts `Re⟨e,x_j⟩` share a sign, `k₁` is built from the
/// smallest ratio `|Re⟨e,x_j⟩|/‖x_j‖`: entrywise on commutative algebras,
/// as a multiple of the unit otherwise. Mixed signs give `k₁ = 0`. The same
/// applies to `k₂` with imaginary parts.
pub fn extract_hermitian_bounds(e: &ModuleVector, xs: &[ModuleVector]) -> Result<HermitianBounds> {
    check_vectors(e.space(), xs)?;
    require_modulus_le_one(e, DEFAULT_TOL)?;
    let norms = nonzero_norms(xs)?;
    let shape = e.space().algebra();
    let (re, im): (Vec<Element>, Vec<Element>) = xs.iter().map(|x| e.inner(x).re_im_parts()).unzip();

    let build = |parts: &[Element]| -> Element {
        let Some(sign) = coherent_sign(parts) else {
            return Element::zeros(shape);
        };
        let oriented: Vec<Element> = parts.iter().map(|p| p.scale_real(sign)).collect();
        if shape.is_commutative() {
            let diag: Vec<f64> = (0..shape.dim())
                .map(|i| {
                    oriented
                        .iter()
                        .zip(&norms)
                        .map(|(p, n)| p.get(i, i).re / n)
                        .fold(f64::INFINITY, f64::min)
                        .max(0.0)
                })
                .collect();
            Element::from_real_diag(shape, &diag).expect("diagonal matches the algebra")
        } else {
            Element::real_scalar(shape, min_ratio(&oriented, &norms))
        }
    };
    HermitianBounds::new(build(&re), build(&im))
}

/// `+1` if every part is positive, `−1` if every part is negative, `None`
/// for mixed signs. Exact comparisons; zero parts count as both.
fn coherent_sign(parts: &[Element]) -> Option<f64> {
    if parts.iter().all(|p| p.lambda_min() >= 0.0) {
        Some(1.0)
    } else if parts.iter().all(|p| p.lambda_max() <= 0.0) {
        Some(-1.0)
    } else {
        None
    }
}

/// Records that the hermitian parts `parts` share a sign, as the argument
/// behind the hermitian-bounds inequality requires.
pub(crate) fn check_sign_coherence(checks: &mut Checks, name: &str, parts: &[Element]) {
    let pos = parts.iter().map(Element::lambda_min).fold(f64::INFINITY, f64::min);
    let neg = parts.iter().map(|p| -p.lambda_max()).fold(f64::INFINITY, f64::min);
    let margin = pos.max(neg);
    let scale = parts.iter().map(Element::hermitian_norm).fold(1.0, f64::max);
    let ok = margin >= -checks.tol() * scale;
    checks.flag(name, ok, margin);
}

pub(crate) fn check_commutes(checks: &mut Checks, name: &str, k: &Element, s: &Element) {
    let defect = k.commutator(s).op_norm();
    let scale = (k.op_norm() * s.op_norm()).max(1.0);
    let ok = defect <= checks.tol() * scale;
    checks.flag(name, ok, -defect);
}

/// Verifies the Löwner form `(k₁² + k₂²)(Σ‖x_j‖)² ≤ ‖Σx_j‖²·1` for hermitian
/// constants satisfying `k₁²‖x_j‖² ≤ (Re⟨e,x_j⟩)²` and
/// `k₂²‖x_j‖² ≤ (Im⟨e,x_j⟩)²`, with `|e| ≤ 1`.
///
/// The squared hypotheses alone do not imply the conclusion, so for each
/// nonzero constant two further conditions are checked: the parts
/// `Re⟨e,x_j⟩` (resp. `Im`) share a sign, and `k₁` commutes with
/// `Re⟨e,Σx_j⟩` (resp. `k₂` with `Im`). Both hold automatically for scalar
/// constants with aligned vectors and for commutative algebras with aligned
/// vectors. The certificate also carries the scalar reading
/// `‖k₁² + k₂²‖^{1/2} Σ‖x_j‖ ≤ ‖Σx_j‖`.
pub fn verify_multiplicative_hermitian(
    e: &ModuleVector,
    xs: &[ModuleVector],
    b: &HermitianBounds,
    tol: f64,
) -> Result<Certificate> {
    check_vectors(e.space(), xs)?;
    let space = e.space();
    if b.k1.shape() != space.algebra() {
        return Err(Error::input("hermitian bounds live in a different algebra"));
    }
    let one = Element::identity(space.algebra());
    let mut checks = Checks::new(tol);
    checks.flag("k1_hermitian", b.k1.is_hermitian(HERMITIAN_TOL), -b.k1.hermitian_defect());
    checks.flag("k2_hermitian", b.k2.is_hermitian(HERMITIAN_TOL), -b.k2.hermitian_defect());
    let k1 = b.k1.hermitian_part();
    let k2 = b.k2.hermitian_part();
    checks.loewner("modulus_e_le_1", &e.gram(), &one)?;

    let k1sq = &k1 * &k1;
    let k2sq = &k2 * &k2;
    let norms: Vec<f64> = xs.iter().map(ModuleVector::norm).collect();
    let mut re_parts = Vec::with_capacity(xs.len());
    let mut im_parts = Vec::with_capacity(xs.len());
    for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
        let (re, im) = e.inner(x).re_im_parts();
        checks.loewner(format!("re_lower[{j}]"), &k1sq.scale_real(n * n), &(&re * &re))?;
        checks.loewner(format!("im_lower[{j}]"), &k2sq.scale_real(n * n), &(&im * &im))?;
        re_parts.push(re);
        im_parts.push(im);
    }

    let sum = ModuleVector::sum(space, xs);
    let (re_sum, im_sum) = e.inner(&sum).re_im_parts();
    if k1.max_abs() > 0.0 {
        check_sign_coherence(&mut checks, "re_sign_coherent", &re_parts);
        check_commutes(&mut checks, "k1_commutes_re_sum", &k1, &re_sum);
    }
    if k2.max_abs() > 0.0 {
        check_sign_coherence(&mut checks, "im_sign_coherent", &im_parts);
        check_commutes(&mut checks, "k2_commutes_im_sum", &k2, &im_sum);
    }

    let total: f64 = norms.iter().sum();
    let ksq = &k1sq + &k2sq;
    let lhs = ksq.scale_real(total * total);
    let rhs_norm = sum.norm();
    let rhs = one.scale_real(rhs_norm * rhs_norm);
    let mut cert = Certificate::operator(TheoremId::MultHermitian, checks, &lhs, &rhs).with_slack_equality();
    let reading_lhs = ksq.lambda_max().max(0.0).sqrt() * total;
    cert.scalar_reading = Some(ScalarReading {
        lhs: reading_lhs,
        rhs: rhs_norm,
        slack: rhs_norm - reading_lhs,
    });
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::certificate::{Quantity, Verdict};
    use crate::module::ModuleSpace;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_vecs(vals: &[Complex64]) -> (ModuleVector, Vec<ModuleVector>) {
        let h = ModuleSpace::hilbert(1).unwrap();
        let e = ModuleVector::from_complex(&h, &[c(1.0, 0.0)]).unwrap();
        let xs = vals.iter().map(|&v| ModuleVector::from_complex(&h, &[v]).unwrap()).collect();
        (e, xs)
    }

    #[test]
    fn extract_scalar_examples() {
        let (e, xs) = scalar_vecs(&[c(3.0, 4.0)]);
        let b = extract_scalar_bounds(&e, &xs).unwrap();
        assert!((b.k1 - 0.6).abs() < 1e-15 && (b.k2 - 0.8).abs() < 1e-15);

        let (e, xs) = scalar_vecs(&[c(3.0, 4.0), c(4.0, 3.0)]);
        let b = extract_scalar_bounds(&e, &xs).unwrap();
        assert!((b.k1 - 0.6).abs() < 1e-15 && (b.k2 - 0.6).abs() < 1e-15);

        let s = ModuleSpace::right(AlgebraShape::full(2).unwrap(), 1).unwrap();
        let e = ModuleVector::slot(&s, 0, Element::identity(s.algebra())).unwrap();
        let x = ModuleVector::slot(&s, 0, Element::from_real_diag(s.algebra(), &[1.0, 2.0]).unwrap()).unwrap();
        let b = extract_scalar_bounds(&e, &[x]).unwrap();
        assert!((b.k1 - 0.5).abs() < 1e-15 && b.k2 == 0.0);
    }

    #[test]
    fn extract_rejects_zero_vectors_and_long_e() {
        let (e, _) = scalar_vecs(&[]);
        let zero = ModuleVector::zeros(e.space());
        assert!(matches!(extract_scalar_bounds(&e, &[zero]), Err(Error::Input(_))));
        let (_, xs) = scalar_vecs(&[c(1.0, 0.0)]);
        let long = e.scale_real(2.0);
        assert!(matches!(extract_scalar_bounds(&long, &xs), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn verify_scalar_examples() {
        let (e, xs) = scalar_vecs(&[c(3.0, 4.0)]);
        let cert = verify_multiplicative_scalar(&e, &xs, ScalarBounds::new(0.6, 0.8).unwrap(), 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified);
        assert!((cert.lhs.distance(&Quantity::Scalar(5.0))) < 1e-14);
        assert!((cert.rhs.distance(&Quantity::Scalar(5.0))) < 1e-14);
        assert!(cert.equality);

        let (e, xs) = scalar_vecs(&[c(3.0, 4.0), c(4.0, 3.0)]);
        let cert = verify_multiplicative_scalar(&e, &xs, ScalarBounds::new(0.6, 0.6).unwrap(), 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified);
        // 0.6·√2·10 and |7 + 7i|
        assert!(cert.lhs.distance(&Quantity::Scalar(6.0 * 2f64.sqrt())) < 1e-13);
        assert!(cert.rhs.distance(&Quantity::Scalar(7.0 * 2f64.sqrt())) < 1e-13);
        assert!(!cert.equality);

        let cert = verify_multiplicative_scalar(&e, &xs, ScalarBounds::zero(), 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified);
        assert_eq!(cert.lhs, Quantity::Scalar(0.0));
    }

    #[test]
    fn verify_scalar_flags_failed_hypotheses() {
        let (e, xs) = scalar_vecs(&[c(3.0, 4.0)]);
        let cert = verify_multiplicative_scalar(&e, &xs, ScalarBounds::new(0.7, 0.8).unwrap(), 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::PreconditionFailed);
        let failed: Vec<_> = cert.failed_preconditions().map(|p| p.name.as_str()).collect();
        assert_eq!(failed, vec!["re_lower[0]"]);
    }

    #[test]
    fn hermitian_commutative_example() {
        // A = ℂ², X = A, e = 1, x = diag(3+4i, 1), k₁ = diag(0.6, 1), k₂ = diag(0.8, 0)
        let s = ModuleSpace::commutative(2, 1).unwrap();
        let a = s.algebra();
        let e = ModuleVector::slot(&s, 0, Element::identity(a)).unwrap();
        let x = ModuleVector::slot(
            &s,
            0,
            Element::from_rows(a, &[vec![c(3.0, 4.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap(),
        )
        .unwrap();
        // hypotheses are tight: k₁²·25 = diag(9, 1) = (Re x)², k₂²·25 = diag(16, 0) = (Im x)²
        let b = HermitianBounds::new(
            Element::from_real_diag(a, &[0.6, 0.2]).unwrap(),
            Element::from_real_diag(a, &[0.8, 0.0]).unwrap(),
        )
        .unwrap();
        let cert = verify_multiplicative_hermitian(&e, &[x.clone()], &b, 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified, "{cert:?}");
        let lhs = Element::from_real_diag(a, &[25.0, 1.0]).unwrap();
        assert!(cert.lhs.distance(&Quantity::Matrix(lhs.to_repr())) < 1e-12);
        assert!(cert.rhs.distance(&Quantity::Matrix(Element::real_scalar(a, 25.0).to_repr())) < 1e-12);
        for p in &cert.preconditions {
            if p.name.starts_with("re_lower") || p.name.starts_with("im_lower") {
                assert!(p.margin.abs() < 1e-12, "{p:?}");
            }
        }
        let extracted = extract_hermitian_bounds(&e, &[x]).unwrap();
        assert!((&extracted.k1 - &b.k1).max_abs() < 1e-15);
        assert!((&extracted.k2 - &b.k2).max_abs() < 1e-15);
    }

    #[test]
    fn hermitian_zero_bounds_always_pass() {
        let (e, xs) = scalar_vecs(&[c(-3.0, 4.0), c(1.0, -7.0)]);
        let b = HermitianBounds::zero(e.space().algebra());
        let cert = verify_multiplicative_hermitian(&e, &xs, &b, 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified);
    }

    #[test]
    fn hermitian_rejects_sign_flipped_alignment() {
        // squared hypotheses hold for x = ±1 with k₁ = 1, but Σx = 0
        let (e, xs) = scalar_vecs(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let b = HermitianBounds::from_scalars(e.space().algebra(), ScalarBounds::new(1.0, 0.0).unwrap());
        let cert = verify_multiplicative_hermitian(&e, &xs, &b, 1e-9).unwrap();
        assert!(cert.precondition("re_lower[0]").unwrap().ok);
        assert!(cert.precondition("re_lower[1]").unwrap().ok);
        assert!(!cert.precondition("re_sign_coherent").unwrap().ok);
        assert_eq!(cert.verdict(), Verdict::PreconditionFailed);
        assert!(!cert.holds);
    }

    #[test]
    fn hermitian_scalar_reading_matches_scalar_verifier() {
        let (e, xs) = scalar_vecs(&[c(3.0, 4.0), c(4.0, 3.0)]);
        let sb = extract_scalar_bounds(&e, &xs).unwrap();
        let hb = HermitianBounds::from_scalars(e.space().algebra(), sb);
        let hc = verify_multiplicative_hermitian(&e, &xs, &hb, 1e-9).unwrap();
        let sc = verify_multiplicative_scalar(&e, &xs, sb, 1e-9).unwrap();
        let reading = hc.scalar_reading.unwrap();
        assert!(Quantity::Scalar(reading.lhs).distance(&sc.lhs) < 1e-13);
        assert!(Quantity::Scalar(reading.rhs).distance(&sc.rhs) < 1e-13);
        assert_eq!(hc.verdict(), sc.verdict());
    }
}
