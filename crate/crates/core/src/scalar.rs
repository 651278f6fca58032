//! Plain complex Hilbert space `ℂⁿ`, written directly in complex arithmetic.
//!
//! Every operation here mirrors one of the module-level verifiers for the
//! algebra `ℂ` (a single 1×1 block) without going through [`Element`]s or
//! the eigensolver, and serves as an oracle for them. With `k₂ = 0` the
//! multiplicative verifier is the Diaz–Metcalf inequality; the additive
//! verifier is Dragomir's Hilbert-space theorem.
//!
//! [`Element`]: crate::algebra::Element

use num_complex::Complex64;

use crate::certificate::{Certificate, Checks, Quantity, ScalarReading, TheoremId, WITNESS_TOL};
use crate::error::{Error, Result};
use crate::json::Cx;
use crate::module::{ModuleSpace, ModuleVector, OrthoFamily, FAMILY_TOL};
use crate::reverse::{AdditiveBounds, FamilyBounds, ScalarBounds};
use crate::DEFAULT_TOL;

/// A vector of `ℂⁿ` with `⟨x,y⟩ = Σ conj(xᵢ) yᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVector(pub Vec<Complex64>);

impl HilbertVector {
    pub fn zeros(n: usize) -> Self {
        HilbertVector(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inner(&self, other: &HilbertVector) -> Complex64 {
        assert_eq!(self.len(), other.len(), "vectors of different lengths");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        HilbertVector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &HilbertVector) -> Self {
        HilbertVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &HilbertVector) -> Self {
        HilbertVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn sum<'a>(n: usize, xs: impl IntoIterator<Item = &'a HilbertVector>) -> Self {
        xs.into_iter().fold(Self::zeros(n), |acc, x| acc.add(x))
    }

    /// The same vector in `ℂ`-module form, over `ModuleSpace::hilbert`.
    pub fn to_module(&self) -> ModuleVector {
        let space = ModuleSpace::hilbert(self.len()).expect("nonempty vector");
        ModuleVector::from_complex(&space, &self.0).expect("finite entries")
    }

    /// Reads a vector of a module over the one-dimensional algebra.
    pub fn from_module(x: &ModuleVector) -> Result<Self> {
        if x.space().algebra().dim() != 1 {
            return Err(Error::input("only modules over ℂ have a scalar form"));
        }
        Ok(HilbertVector(x.coords().iter().map(|c| c.get(0, 0)).collect()))
    }
}

/// Orthonormal family in `ℂⁿ`; `strict` mirrors [`OrthoFamily::is_strict`].
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertFamily {
    pub members: Vec<HilbertVector>,
    pub strict: bool,
}

impl HilbertFamily {
    pub fn from_module(f: &OrthoFamily) -> Result<Self> {
        Ok(HilbertFamily {
            members: f.members().iter().map(HilbertVector::from_module).collect::<Result<_>>()?,
            strict: f.is_strict(),
        })
    }

    fn dim(&self) -> usize {
        self.members[0].len()
    }

    fn unit(&self) -> bool {
        self.members.iter().all(|e| (e.norm_sqr() - 1.0).abs() <= FAMILY_TOL)
    }
}

fn c1(v: Complex64) -> Quantity {
    Quantity::Matrix(vec![vec![Cx(v)]])
}

fn r1(v: f64) -> Quantity {
    c1(Complex64::new(v, 0.0))
}

fn scalar_cert(theorem: TheoremId, checks: Checks, lhs: f64, rhs: f64) -> Certificate {
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    Certificate::assemble(theorem, checks, Quantity::Scalar(lhs), Quantity::Scalar(rhs), rhs - lhs, scale)
}

fn operator_cert(theorem: TheoremId, checks: Checks, lhs: f64, rhs: f64) -> Certificate {
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    Certificate::assemble(theorem, checks, r1(lhs), r1(rhs), rhs - lhs, scale)
}

fn slack_equality(mut cert: Certificate) -> Certificate {
    cert.equality = cert.preconditions_ok && cert.relative_slack.abs() <= cert.tol;
    cert
}

fn witness(mut cert: Certificate, residual: f64, scale: f64) -> Certificate {
    cert.witness_residual = Some(residual);
    cert.equality =
        cert.preconditions_ok && cert.relative_slack.abs() <= cert.tol && residual <= WITNESS_TOL * scale;
    cert
}

fn nonzero_norms(xs: &[HilbertVector]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::input("at least one vector x_j is required"));
    }
    xs.iter()
        .enumerate()
        .map(|(j, x)| match x.norm() {
            n if n == 0.0 => Err(Error::input(format!("x_{j} is zero; bounds are undefined"))),
            n => Ok(n),
        })
        .collect()
}

fn require_unit_ball(e: &HilbertVector) -> Result<()> {
    let g = e.norm_sqr();
    if g - 1.0 > DEFAULT_TOL * g.max(1.0) {
        return Err(Error::Hypothesis {
            hypothesis: "|e| ≤ 1".into(),
            deviation: g - 1.0,
        });
    }
    Ok(())
}

/// Cauchy–Schwarz: `|⟨x,y⟩|² ≤ ‖x‖²‖y‖²`.
pub fn cs_gap(x: &HilbertVector, y: &HilbertVector, tol: f64) -> Certificate {
    let xy = x.inner(y);
    operator_cert(TheoremId::CauchySchwarz, Checks::new(tol), xy.norm_sqr(), x.norm_sqr() * y.norm_sqr())
}

/// Bessel: `Σ_k |⟨e_k,x⟩|² ≤ ‖x‖²`.
pub fn bessel_defect(x: &HilbertVector, family: &HilbertFamily, tol: f64) -> Certificate {
    let lhs: f64 = family.members.iter().map(|e| e.inner(x).norm_sqr()).sum();
    slack_equality(operator_cert(TheoremId::Bessel, Checks::new(tol), lhs, x.norm_sqr()))
}

pub fn extract_scalar_bounds(e: &HilbertVector, xs: &[HilbertVector]) -> Result<ScalarBounds> {
    require_unit_ball(e)?;
    let norms = nonzero_norms(xs)?;
    let ratio = |f: fn(Complex64) -> f64| {
        xs.iter()
            .zip(&norms)
            .map(|(x, n)| f(e.inner(x)) / n)
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    };
    Ok(ScalarBounds {
        k1: ratio(|c| c.re),
        k2: ratio(|c| c.im),
    })
}

/// `(k₁² + k₂²)^{1/2} Σ‖x_j‖ ≤ ‖Σx_j‖` in `ℂⁿ`.
pub fn verify_multiplicative_scalar(
    e: &HilbertVector,
    xs: &[HilbertVector],
    b: ScalarBounds,
    tol: f64,
) -> Certificate {
    let mut checks = Checks::new(tol);
    checks.scalar_leq("modulus_e_le_1", e.norm_sqr(), 1.0);
    checks.flag("k1_nonneg", b.k1 >= 0.0, b.k1);
    checks.flag("k2_nonneg", b.k2 >= 0.0, b.k2);
    let norms: Vec<f64> = xs.iter().map(HilbertVector::norm).collect();
    for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
        let c = e.inner(x);
        checks.scalar_leq(format!("re_lower[{j}]"), b.k1 * n, c.re);
        checks.scalar_leq(format!("im_lower[{j}]"), b.k2 * n, c.im);
    }
    let total: f64 = norms.iter().sum();
    let sum = HilbertVector::sum(e.len(), xs);
    let lhs = (b.k1 * b.k1 + b.k2 * b.k2).sqrt() * total;
    let w = sum.sub(&e.scale(Complex64::new(b.k1, b.k2) * total));
    let mut cert = witness(scalar_cert(TheoremId::MultScalar, checks, lhs, sum.norm()), w.norm(), total);
    if (e.norm_sqr() - 1.0).abs() > FAMILY_TOL {
        cert.notes.push("⟨e,e⟩ ≠ 1: the witness form of the equality case is not guaranteed".into());
    }
    cert
}

/// Diaz–Metcalf: for a unit vector `e` and `r ≥ 0` with
/// `r‖x_j‖ ≤ Re⟨e,x_j⟩`, `r Σ‖x_j‖ ≤ ‖Σx_j‖`.
pub fn diaz_metcalf(e: &HilbertVector, xs: &[HilbertVector], r: f64, tol: f64) -> Certificate {
    verify_multiplicative_scalar(e, xs, ScalarBounds { k1: r, k2: 0.0 }, tol)
}

fn sign_coherence(checks: &mut Checks, name: &str, parts: &[f64]) {
    let pos = parts.iter().copied().fold(f64::INFINITY, f64::min);
    let neg = parts.iter().map(|p| -p).fold(f64::INFINITY, f64::min);
    let margin = pos.max(neg);
    let scale = parts.iter().map(|p| p.abs()).fold(1.0, f64::max);
    let ok = margin >= -checks.tol() * scale;
    checks.flag(name, ok, margin);
}

/// Hermitian constants in `ℂ` are real numbers; see
/// [`verify_multiplicative_hermitian`](crate::reverse::verify_multiplicative_hermitian).
pub fn verify_multiplicative_hermitian(
    e: &HilbertVector,
    xs: &[HilbertVector],
    k1: f64,
    k2: f64,
    tol: f64,
) -> Certificate {
    let mut checks = Checks::new(tol);
    checks.flag("k1_hermitian", true, -0.0);
    checks.flag("k2_hermitian", true, -0.0);
    checks.scalar_leq("modulus_e_le_1", e.norm_sqr(), 1.0);
    let norms: Vec<f64> = xs.iter().map(HilbertVector::norm).collect();
    let mut re = Vec::with_capacity(xs.len());
    let mut im = Vec::with_capacity(xs.len());
    for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
        let c = e.inner(x);
        checks.scalar_leq(format!("re_lower[{j}]"), k1 * k1 * (n * n), c.re * c.re);
        checks.scalar_leq(format!("im_lower[{j}]"), k2 * k2 * (n * n), c.im * c.im);
        re.push(c.re);
        im.push(c.im);
    }
    if k1 != 0.0 {
        sign_coherence(&mut checks, "re_sign_coherent", &re);
        checks.flag("k1_commutes_re_sum", true, -0.0);
    }
    if k2 != 0.0 {
        sign_coherence(&mut checks, "im_sign_coherent", &im);
        checks.flag("k2_commutes_im_sum", true, -0.0);
    }
    let total: f64 = norms.iter().sum();
    let sum = HilbertVector::sum(e.len(), xs);
    let ksq = k1 * k1 + k2 * k2;
    let rhs = sum.norm();
    let mut cert = slack_equality(operator_cert(
        TheoremId::MultHermitian,
        checks,
        ksq * (total * total),
        rhs * rhs,
    ));
    let reading_lhs = ksq.sqrt() * total;
    cert.scalar_reading = Some(ScalarReading {
        lhs: reading_lhs,
        rhs,
        slack: rhs - reading_lhs,
    });
    cert
}

pub fn extract_family_bounds(family: &HilbertFamily, xs: &[HilbertVector]) -> Result<FamilyBounds> {
    let norms = nonzero_norms(xs)?;
    let mut r = Vec::new();
    let mut rho = Vec::new();
    for e in &family.members {
        let (mut lo_re, mut lo_im) = (f64::INFINITY, f64::INFINITY);
        for (x, n) in xs.iter().zip(&norms) {
            let c = e.inner(x);
            lo_re = lo_re.min(c.re / n);
            lo_im = lo_im.min(c.im / n);
        }
        r.push(lo_re.max(0.0));
        rho.push(lo_im.max(0.0));
    }
    FamilyBounds::new(r, rho)
}

fn combination(family: &HilbertFamily, b: &FamilyBounds) -> HilbertVector {
    family
        .members
        .iter()
        .zip(b.r.iter().zip(&b.rho))
        .fold(HilbertVector::zeros(family.dim()), |acc, (e, (&r, &rho))| {
            acc.add(&e.scale(Complex64::new(r, rho)))
        })
}

fn signed_lower(checks: &mut Checks, name: String, c: f64, n: f64, h: f64) -> bool {
    if c > 0.0 {
        checks.scalar_leq(name, c * n, h)
    } else if c < 0.0 {
        checks.scalar_leq(name, h, c * n)
    } else {
        checks.scalar_leq(name, 0.0, 0.0)
    }
}

fn square_sum(b: &FamilyBounds) -> f64 {
    b.r.iter().chain(&b.rho).map(|v| v * v).sum()
}

pub fn verify_family_norm(family: &HilbertFamily, xs: &[HilbertVector], b: &FamilyBounds, tol: f64) -> Certificate {
    let mut checks = Checks::new(tol);
    let norms: Vec<f64> = xs.iter().map(HilbertVector::norm).collect();
    for (k, e) in family.members.iter().enumerate() {
        let (r, rho) = (b.r[k], b.rho[k]);
        for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
            let c = e.inner(x);
            signed_lower(&mut checks, format!("re_lower[{j},{k}]"), r, n, c.re);
            signed_lower(&mut checks, format!("im_lower[{j},{k}]"), rho, n, c.im);
        }
    }
    let total: f64 = norms.iter().sum();
    let sum = HilbertVector::sum(family.dim(), xs);
    let lhs = square_sum(b).sqrt() * total;
    let w = sum.sub(&combination(family, b).scale(Complex64::new(total, 0.0)));
    let mut cert = witness(scalar_cert(TheoremId::FamilyNorm, checks, lhs, sum.norm()), w.norm(), total);
    if !family.strict {
        cert.notes.push("non-strict family: equality is certified only in the witness direction".into());
    }
    cert
}

pub fn build_equality_instance(family: &HilbertFamily, b: &FamilyBounds, norms: &[f64]) -> Result<Vec<HilbertVector>> {
    if !family.strict {
        return Err(Error::capability("equality instances need a strict family"));
    }
    if (square_sum(b) - 1.0).abs() > 1e-12 {
        return Err(Error::input("Σ(r_k² + ρ_k²) must be 1"));
    }
    let v = combination(family, b);
    Ok(norms.iter().map(|&t| v.scale(Complex64::new(t, 0.0))).collect())
}

/// In `ℂⁿ` the modulus `|Σx_j|` is the norm `‖Σx_j‖`.
pub fn verify_family_modulus(
    family: &HilbertFamily,
    xs: &[HilbertVector],
    b: &FamilyBounds,
    tol: f64,
) -> Certificate {
    let mut checks = Checks::new(tol);
    for (k, (&r, &rho)) in b.r.iter().zip(&b.rho).enumerate() {
        checks.flag(format!("r_nonneg[{k}]"), r >= 0.0, r);
        checks.flag(format!("rho_nonneg[{k}]"), rho >= 0.0, rho);
    }
    let norms: Vec<f64> = xs.iter().map(HilbertVector::norm).collect();
    for (k, e) in family.members.iter().enumerate() {
        for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
            let c = e.inner(x);
            checks.scalar_leq(format!("re_lower[{j},{k}]"), b.r[k] * n, c.re);
            checks.scalar_leq(format!("im_lower[{j},{k}]"), b.rho[k] * n, c.im);
        }
    }
    let total: f64 = norms.iter().sum();
    let sum = HilbertVector::sum(family.dim(), xs);
    let cert = operator_cert(TheoremId::FamilyModulus, checks, square_sum(b).sqrt() * total, sum.norm());
    if family.strict {
        let w = sum.sub(&combination(family, b).scale(Complex64::new(total, 0.0)));
        witness(cert, w.norm(), total)
    } else {
        let mut cert = cert;
        cert.notes.push("non-strict family: equality is not certified".into());
        cert
    }
}

pub fn extract_additive_bounds(family: &HilbertFamily, xs: &[HilbertVector]) -> AdditiveBounds {
    AdditiveBounds {
        m: xs
            .iter()
            .map(|x| {
                let n = x.norm();
                family.members.iter().map(|e| (n - e.inner(x).re).max(0.0)).collect()
            })
            .collect(),
    }
}

/// Dragomir's additive reverse inequality
/// `Σ‖x_j‖ ≤ m^{-1/2}‖Σx_j‖ + m^{-1} Σ M_jk` for orthonormal `e_k` in `ℂⁿ`.
pub fn verify_additive(family: &HilbertFamily, xs: &[HilbertVector], b: &AdditiveBounds, tol: f64) -> Certificate {
    let mut checks = Checks::new(tol);
    for (k, e) in family.members.iter().enumerate() {
        checks.scalar_leq(format!("modulus_e_le_1[{k}]"), e.norm_sqr(), 1.0);
    }
    let norms: Vec<f64> = xs.iter().map(HilbertVector::norm).collect();
    for (j, (x, &n)) in xs.iter().zip(&norms).enumerate() {
        for (k, e) in family.members.iter().enumerate() {
            checks.scalar_leq(format!("defect_le_m[{j},{k}]"), n - e.inner(x).re, b.m[j][k]);
        }
    }
    let m = family.members.len() as f64;
    let total: f64 = norms.iter().sum();
    let mean_m = b.m.iter().flatten().sum::<f64>() / m;
    let sum = HilbertVector::sum(family.dim(), xs);
    let mut cert = scalar_cert(TheoremId::Additive, checks, total, sum.norm() / m.sqrt() + mean_m);
    if !family.unit() {
        cert.notes.push("some |e_k| ≠ 1: equality is not characterized".into());
        return cert;
    }
    let e_sum = HilbertVector::sum(family.dim(), &family.members);
    let w = sum.sub(&e_sum.scale(Complex64::new(total - mean_m, 0.0)));
    let mut cert = witness(cert, w.norm(), total);
    cert.equality &= total - mean_m >= -tol * total.max(mean_m).max(1.0);
    cert
}

/// Dragomir's theorem under its own name.
pub fn dragomir(family: &HilbertFamily, xs: &[HilbertVector], b: &AdditiveBounds, tol: f64) -> Certificate {
    verify_additive(family, xs, b, tol)
}
