//! Sampled paths `f: [a,b] → X` and the integral form of the hermitian-bounds
//! reverse inequality,
//!
//! ```text
//! (a₁² + a₂²)(∫‖f‖)² ≤ ‖∫f‖²·1    given  a₁²‖f(t)‖² ≤ (Re⟨f(t),e⟩)²,  a₂²‖f(t)‖² ≤ (Im⟨f(t),e⟩)²
//! ```
//!
//! Integrals are midpoint sums over `N` equal panels; hypotheses are checked
//! at every node.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, HERMITIAN_TOL};
use crate::certificate::{Certificate, Checks, ScalarReading, TheoremId};
use crate::error::{Error, Result};
use crate::module::{ModuleSpace, ModuleVector};
use crate::reverse::{check_commutes, check_sign_coherence, extract_hermitian_bounds, HermitianBounds};

pub const DEFAULT_NODES: usize = 1024;

/// Built-in smooth paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum PathGenerator {
    /// `f(t) = e^{iωt}·base`.
    ExpCircle {
        base: ModuleVector,
        #[serde(default = "unit_frequency")]
        omega: f64,
    },
    /// `f(t) = offset + t·slope`.
    Linear { offset: ModuleVector, slope: ModuleVector },
}

fn unit_frequency() -> f64 {
    1.0
}

impl PathGenerator {
    pub fn space(&self) -> &ModuleSpace {
        match self {
            PathGenerator::ExpCircle { base, .. } => base.space(),
            PathGenerator::Linear { offset, .. } => offset.space(),
        }
    }

    pub fn eval(&self, t: f64) -> ModuleVector {
        match self {
            PathGenerator::ExpCircle { base, omega } => base.scale(Complex64::from_polar(1.0, omega * t)),
            PathGenerator::Linear { offset, slope } => offset + &slope.scale_real(t),
        }
    }
}

/// Path description as it appears in instance files: explicit samples or a
/// generator with a node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSpec {
    Samples {
        a: f64,
        b: f64,
        samples: Vec<ModuleVector>,
    },
    Generated {
        a: f64,
        b: f64,
        #[serde(default = "default_nodes")]
        n: usize,
        #[serde(flatten)]
        generator: PathGenerator,
    },
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

impl PathSpec {
    pub fn build(&self) -> Result<SampledPath> {
        match self {
            PathSpec::Samples { a, b, samples } => {
                let space = samples
                    .first()
                    .ok_or_else(|| Error::input("a path needs at least two samples"))?
                    .space()
                    .clone();
                SampledPath::new(&space, *a, *b, samples.clone())
            }
            PathSpec::Generated { a, b, n, generator } => SampledPath::from_generator(generator, *a, *b, *n),
        }
    }
}

/// Values of `f` at the midpoint nodes `t_i = a + (i + ½)(b − a)/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    space: ModuleSpace,
    a: f64,
    b: f64,
    samples: Vec<ModuleVector>,
    refinement: Option<(f64, f64)>,
}

impl SampledPath {
    pub fn new(space: &ModuleSpace, a: f64, b: f64, samples: Vec<ModuleVector>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::input(format!("interval [{a}, {b}] must satisfy a < b")));
        }
        if samples.len() < 2 {
            return Err(Error::input("a path needs at least two samples"));
        }
        if let Some(i) = samples.iter().position(|f| f.space() != space) {
            return Err(Error::input(format!("sample {i} lives in a different module")));
        }
        Ok(SampledPath {
            space: space.clone(),
            a,
            b,
            samples,
            refinement: None,
        })
    }

    /// Samples a generator at `n` midpoint nodes and records how much both
    /// integrals move when `n` is doubled.
    pub fn from_generator(generator: &PathGenerator, a: f64, b: f64, n: usize) -> Result<Self> {
        let sample = |n: usize| {
            let h = (b - a) / n as f64;
            (0..n).map(|i| generator.eval(a + (i as f64 + 0.5) * h)).collect::<Vec<_>>()
        };
        let mut path = Self::new(generator.space(), a, b, sample(n))?;
        let fine = Self::new(generator.space(), a, b, sample(2 * n))?;
        let (s0, v0) = path.integrate();
        let (s1, v1) = fine.integrate();
        path.refinement = Some(((s0 - s1).abs(), (&v0 - &v1).norm()));
        Ok(path)
    }

    pub fn space(&self) -> &ModuleSpace {
        &self.space
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn samples(&self) -> &[ModuleVector] {
        &self.samples
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.samples.len()).map(|i| self.a + (i as f64 + 0.5) * h).collect()
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.samples.len() as f64
    }

    /// Change of `(∫‖f‖, ∫f)` under doubling `N`, for generated paths.
    pub fn refinement_error(&self) -> Option<(f64, f64)> {
        self.refinement
    }

    /// Midpoint approximations of `(∫‖f‖, ∫f)`.
    pub fn integrate(&self) -> (f64, ModuleVector) {
        let h = self.step();
        let norms: f64 = self.samples.iter().map(ModuleVector::norm).sum();
        (h * norms, ModuleVector::sum(&self.space, &self.samples).scale_real(h))
    }
}

/// Midpoint approximations of `(∫‖f‖, ∫f)`.
pub fn integrate(path: &SampledPath) -> (f64, ModuleVector) {
    path.integrate()
}

/// Hermitian constants satisfying the node hypotheses by construction.
///
/// Since `Re⟨f,e⟩ = Re⟨e,f⟩` and `Im⟨f,e⟩ = −Im⟨e,f⟩`, the squared
/// hypotheses coincide with the discrete ones and the discrete extractor
/// applies to the samples.
pub fn extract_integral_bounds(path: &SampledPath, e: &ModuleVector) -> Result<HermitianBounds> {
    extract_hermitian_bounds(e, path.samples())
}

/// Verifies the Löwner form `(a₁² + a₂²)(∫‖f‖)² ≤ ‖∫f‖²·1` on a sampled path.
///
/// Hypotheses `a₁²‖f(t_i)‖² ≤ (Re⟨f(t_i),e⟩)²` (and with `Im`, `a₂`) are
/// checked at each node `i`. As in the discrete hermitian verifier, nonzero
/// constants also need the parts `Re⟨f(t_i),e⟩` to share a sign and `a₁` to
/// commute with `Re⟨∫f,e⟩`. For generated paths the doubling estimate of the
/// quadrature error, relative to the certificate scale, is added to `tol`
/// when judging the conclusion.
pub fn verify_integral_corollary(
    path: &SampledPath,
    e: &ModuleVector,
    a1: &Element,
    a2: &Element,
    tol: f64,
) -> Result<Certificate> {
    let space = path.space();
    if e.space() != space {
        return Err(Error::input("e lives in a different module than the path"));
    }
    if a1.shape() != space.algebra() || a2.shape() != space.algebra() {
        return Err(Error::input("a₁, a₂ must live in the module's algebra"));
    }
    let one = Element::identity(space.algebra());
    let mut checks = Checks::new(tol);
    checks.flag("a1_hermitian", a1.is_hermitian(HERMITIAN_TOL), -a1.hermitian_defect());
    checks.flag("a2_hermitian", a2.is_hermitian(HERMITIAN_TOL), -a2.hermitian_defect());
    let a1 = a1.hermitian_part();
    let a2 = a2.hermitian_part();
    checks.loewner("modulus_e_le_1", &e.gram(), &one)?;

    let a1sq = &a1 * &a1;
    let a2sq = &a2 * &a2;
    let node_data: Vec<(f64, Element, Element)> = path
        .samples()
        .par_iter()
        .map(|f| {
            let (re, im) = f.inner(e).re_im_parts();
            (f.norm(), re, im)
        })
        .collect();
    let mut re_parts = Vec::with_capacity(node_data.len());
    let mut im_parts = Vec::with_capacity(node_data.len());
    for (i, (n, re, im)) in node_data.into_iter().enumerate() {
        checks.loewner(format!("re_lower[{i}]"), &a1sq.scale_real(n * n), &(&re * &re))?;
        checks.loewner(format!("im_lower[{i}]"), &a2sq.scale_real(n * n), &(&im * &im))?;
        re_parts.push(re);
        im_parts.push(im);
    }

    let (norm_integral, integral) = path.integrate();
    let (re_int, im_int) = integral.inner(e).re_im_parts();
    if a1.max_abs() > 0.0 {
        check_sign_coherence(&mut checks, "re_sign_coherent", &re_parts);
        check_commutes(&mut checks, "a1_commutes_re_integral", &a1, &re_int);
    }
    if a2.max_abs() > 0.0 {
        check_sign_coherence(&mut checks, "im_sign_coherent", &im_parts);
        check_commutes(&mut checks, "a2_commutes_im_integral", &a2, &im_int);
    }

    let asq = &a1sq + &a2sq;
    let rhs_norm = integral.norm();
    let lhs = asq.scale_real(norm_integral * norm_integral);
    let rhs = one.scale_real(rhs_norm * rhs_norm);
    let mut cert = Certificate::operator(TheoremId::Integral, checks, &lhs, &rhs);

    if let Some((d_norm, d_vec)) = path.refinement_error() {
        let k = asq.hermitian_norm();
        let drift = k * (2.0 * norm_integral + d_norm) * d_norm + (2.0 * rhs_norm + d_vec) * d_vec;
        let extra = drift / cert.scale;
        cert.tol = tol + extra;
        cert.holds = cert.slack >= -cert.tol * cert.scale;
        cert = cert.note(format!("discretization tolerance {extra:e} added to tol"));
    }
    let mut cert = cert.with_slack_equality();
    let reading_lhs = asq.lambda_max().max(0.0).sqrt() * norm_integral;
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
    use crate::certificate::Verdict;
    use std::f64::consts::PI;

    fn scalar_base() -> ModuleVector {
        let h = ModuleSpace::hilbert(1).unwrap();
        ModuleVector::from_complex(&h, &[Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn constant_and_linear_paths() {
        let x = ModuleVector::from_complex(&ModuleSpace::hilbert(2).unwrap(), &[
            Complex64::new(1.0, 2.0),
            Complex64::new(0.0, -1.0),
        ])
        .unwrap();
        let path = SampledPath::new(x.space(), 0.0, 1.0, vec![x.clone(); 8]).unwrap();
        let (s, v) = path.integrate();
        assert!((s - x.norm()).abs() < 1e-14);
        assert!((&v - &x).norm() < 1e-14);

        let zero = ModuleVector::zeros(x.space());
        let gen = PathGenerator::Linear { offset: zero, slope: x.clone() };
        let path = SampledPath::from_generator(&gen, 0.0, 1.0, 64).unwrap();
        let (s, v) = path.integrate();
        // f(t) = t·x is linear, so the midpoint rule is exact
        assert!((s - x.norm() / 2.0).abs() < 1e-14);
        assert!((&v - &x.scale_real(0.5)).norm() < 1e-14);
    }

    #[test]
    fn exp_circle_desk_check() {
        let gen = PathGenerator::ExpCircle { base: scalar_base(), omega: 1.0 };
        let path = SampledPath::from_generator(&gen, 0.0, PI / 3.0, DEFAULT_NODES).unwrap();
        let (_, v) = path.integrate();
        assert!((v.norm() - 1.0).abs() < 1e-3);

        let a = path.space().algebra();
        let cert =
            verify_integral_corollary(&path, &scalar_base(), &Element::real_scalar(a, 0.5), &Element::zeros(a), 1e-9)
                .unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified);
        let reading = cert.scalar_reading.unwrap();
        assert!((reading.lhs - PI / 6.0).abs() < 1e-6);
        assert!((reading.rhs - 1.0).abs() < 1e-3);
    }

    #[test]
    fn refinement_is_second_order() {
        let gen = PathGenerator::ExpCircle { base: scalar_base(), omega: 1.0 };
        let d = |n| SampledPath::from_generator(&gen, 0.0, PI / 3.0, n).unwrap().refinement_error().unwrap().1;
        let ratio = d(64) / d(128);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn node_failures_are_indexed() {
        let gen = PathGenerator::ExpCircle { base: scalar_base(), omega: 1.0 };
        let path = SampledPath::from_generator(&gen, 0.0, PI, 8).unwrap();
        let a = path.space().algebra();
        let cert =
            verify_integral_corollary(&path, &scalar_base(), &Element::real_scalar(a, 0.5), &Element::zeros(a), 1e-9)
                .unwrap();
        assert_eq!(cert.verdict(), Verdict::PreconditionFailed);
        assert!(cert.precondition("re_lower[0]").unwrap().ok);
        assert!(!cert.precondition("re_lower[4]").unwrap().ok);
    }

    #[test]
    fn constant_unit_path_is_an_equality() {
        let e = scalar_base();
        let path = SampledPath::new(e.space(), 0.0, 2.0, vec![e.clone(); 16]).unwrap();
        let a = e.space().algebra();
        let cert = verify_integral_corollary(&path, &e, &Element::identity(a), &Element::zeros(a), 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified);
        assert!(cert.equality);
    }

    #[test]
    fn extracted_bounds_satisfy_node_hypotheses() {
        let h = ModuleSpace::hilbert(2).unwrap();
        let base = ModuleVector::from_complex(&h, &[Complex64::new(1.0, 0.5), Complex64::new(0.2, 0.0)]).unwrap();
        let e = ModuleVector::from_complex(&h, &[Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)]).unwrap();
        let path = SampledPath::from_generator(&PathGenerator::ExpCircle { base, omega: 0.7 }, 0.0, 1.0, 32).unwrap();
        let b = extract_integral_bounds(&path, &e).unwrap();
        let cert = verify_integral_corollary(&path, &e, &b.k1, &b.k2, 1e-9).unwrap();
        assert_eq!(cert.verdict(), Verdict::Verified, "{cert:?}");
    }

    #[test]
    fn path_spec_json() {
        let spec: PathSpec = serde_json::from_str(
            r#"{"generator":"exp-circle","a":0,"b":1.0471975511965976,"n":16,
                "base":{"space":{"algebra":{"blocks":[1]},"rank":1},"coords":[[[[1,0]]]]}}"#,
        )
        .unwrap();
        let path = spec.build().unwrap();
        assert_eq!(path.samples().len(), 16);
        assert!(path.refinement_error().is_some());
        let back: PathSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
