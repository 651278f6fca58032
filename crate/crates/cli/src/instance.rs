//! Instance files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "theorem": "mult-scalar",
//!   "algebra": {"blocks": [1]},
//!   "rank": 1,
//!   "e": [[1, 0]],
//!   "xs": [[[3, 4]]]
//! }
//! ```
//!
//! A vector is a list of `rank` coordinates. A coordinate is either a full
//! row-major matrix or a single complex number `[re, im]` (or a real number)
//! standing for that multiple of the unit.

use num_complex::Complex64;
use revtri_core::json::{Cx, MatrixRepr};
use revtri_core::quadrature::{PathGenerator, PathSpec};
use revtri_core::reverse::{AdditiveBounds, FamilyBounds, HermitianBounds, ScalarBounds};
use revtri_core::{Action, AlgebraShape, Element, ModuleSpace, ModuleVector, OrthoFamily, TheoremId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

/// Schema or consistency violation, located by a JSON pointer.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}: {message}", if pointer.is_empty() { "<root>" } else { pointer.as_str() })]
pub struct SchemaError {
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        SchemaError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, expecting = "a complex number [re, im], a real number, or a row-major matrix")]
pub enum CoordRepr {
    Scalar(Cx),
    Matrix(MatrixRepr),
}

impl CoordRepr {
    fn to_element(&self, shape: &AlgebraShape) -> revtri_core::Result<Element> {
        match self {
            CoordRepr::Scalar(c) => Ok(Element::scalar(shape, c.0)),
            CoordRepr::Matrix(m) => Element::from_repr(shape, m),
        }
    }

    fn from_element(a: &Element) -> Self {
        if a.dim() == 1 {
            CoordRepr::Scalar(Cx(a.get(0, 0)))
        } else {
            CoordRepr::Matrix(a.to_repr())
        }
    }
}

pub type VectorRepr = Vec<CoordRepr>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    #[serde(default = "strict_default")]
    pub strict: bool,
    pub members: Vec<VectorRepr>,
}

fn strict_default() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    ExpCircle,
    Linear,
}

/// Either `samples` (midpoint values) or a `generator` with its vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<VectorRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<VectorRepr>,
}

/// Constants for the theorem at hand; which fields apply depends on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<CoordRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<CoordRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<f64>>>,
}

impl BoundsFile {
    pub fn from_scalar(b: ScalarBounds) -> Self {
        BoundsFile {
            k1: Some(CoordRepr::Scalar(Cx(Complex64::new(b.k1, 0.0)))),
            k2: Some(CoordRepr::Scalar(Cx(Complex64::new(b.k2, 0.0)))),
            ..Default::default()
        }
    }

    pub fn from_hermitian(b: &HermitianBounds) -> Self {
        BoundsFile {
            k1: Some(CoordRepr::from_element(&b.k1)),
            k2: Some(CoordRepr::from_element(&b.k2)),
            ..Default::default()
        }
    }

    pub fn from_family(b: &FamilyBounds) -> Self {
        BoundsFile {
            r: Some(b.r.clone()),
            rho: Some(b.rho.clone()),
            ..Default::default()
        }
    }

    pub fn from_additive(b: &AdditiveBounds) -> Self {
        BoundsFile {
            m: Some(b.m.clone()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub algebra: AlgebraShape,
    pub rank: usize,
    #[serde(default)]
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<VectorRepr>>,
    /// Algebra element for the `diamond` identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<CoordRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsFile>,
    /// `‖x_j‖` of a constructed family equality instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norms: Option<Vec<f64>>,
    /// `t_j` of a constructed additive equality instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { variant } => out.push_str(&format!("/{}", escape(variant))),
            Segment::Unknown => {}
        }
    }
    out
}

/// Parses and schema-checks an instance file. Cross-references are checked
/// by [`InstanceFile::resolve`].
pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile, SchemaError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SchemaError::new("", format!("not UTF-8: {e}")))?;
    let mut de = serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = pointer_of(e.path());
        SchemaError::new(pointer, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| SchemaError::new("", e.to_string()))?;
    if file.version != FORMAT_VERSION {
        return Err(SchemaError::new(
            "/version",
            format!("unsupported version {}, expected {FORMAT_VERSION}", file.version),
        ));
    }
    Ok(file)
}

/// An instance file with every vector decoded into its module.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub space: ModuleSpace,
    pub e: Option<ModuleVector>,
    pub family: Option<OrthoFamily>,
    pub xs: Option<Vec<ModuleVector>>,
    pub a: Option<Element>,
    pub path: Option<PathSpec>,
}

impl Resolved {
    pub fn e(&self) -> Result<&ModuleVector, SchemaError> {
        self.e.as_ref().ok_or_else(|| missing("/e"))
    }

    pub fn family(&self) -> Result<&OrthoFamily, SchemaError> {
        self.family.as_ref().ok_or_else(|| missing("/family"))
    }

    pub fn xs(&self) -> Result<&[ModuleVector], SchemaError> {
        self.xs.as_deref().ok_or_else(|| missing("/xs"))
    }

    pub fn a(&self) -> Result<&Element, SchemaError> {
        self.a.as_ref().ok_or_else(|| missing("/a"))
    }

    pub fn path(&self) -> Result<&PathSpec, SchemaError> {
        self.path.as_ref().ok_or_else(|| missing("/path"))
    }
}

fn missing(pointer: &str) -> SchemaError {
    SchemaError::new(pointer, "required field is missing")
}

struct Decoder<'a> {
    space: &'a ModuleSpace,
    /// First vector seen, used to name both sides of a rank mismatch.
    reference: Option<(String, usize)>,
}

impl Decoder<'_> {
    fn check_rank(&mut self, pointer: &str, len: usize) -> Result<(), SchemaError> {
        match &self.reference {
            Some((p, r)) if *r != len => Err(SchemaError::new(
                pointer,
                format!("rank mismatch: {pointer} has {len} coordinates but {p} has {r}"),
            )),
            Some(_) => Ok(()),
            None => {
                if len != self.space.rank() {
                    return Err(SchemaError::new(
                        pointer,
                        format!(
                            "rank mismatch: {pointer} has {len} coordinates but /rank is {}",
                            self.space.rank()
                        ),
                    ));
                }
                self.reference = Some((pointer.to_string(), len));
                Ok(())
            }
        }
    }

    fn vector(&mut self, pointer: &str, v: &VectorRepr) -> Result<ModuleVector, SchemaError> {
        self.check_rank(pointer, v.len())?;
        let shape = self.space.algebra();
        let coords = v
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_element(shape).map_err(|e| SchemaError::new(format!("{pointer}/{i}"), e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        ModuleVector::from_coords(self.space, coords).map_err(|e| SchemaError::new(pointer, e.to_string()))
    }

    fn vectors(&mut self, pointer: &str, vs: &[VectorRepr]) -> Result<Vec<ModuleVector>, SchemaError> {
        vs.iter()
            .enumerate()
            .map(|(j, v)| self.vector(&format!("{pointer}/{j}"), v))
            .collect()
    }

    fn path(&mut self, p: &PathFile) -> Result<PathSpec, SchemaError> {
        let need = |field: Option<&VectorRepr>, name: &str| field.cloned().ok_or_else(|| missing(&format!("/path/{name}")));
        match (&p.samples, p.generator) {
            (Some(_), Some(_)) => Err(SchemaError::new("/path", "give either samples or a generator, not both")),
            (None, None) => Err(SchemaError::new("/path", "needs samples or a generator")),
            (Some(samples), None) => {
                if p.n.is_some() {
                    return Err(SchemaError::new("/path/n", "the node count of a sampled path is its sample count"));
                }
                Ok(PathSpec::Samples {
                    a: p.a,
                    b: p.b,
                    samples: self.vectors("/path/samples", samples)?,
                })
            }
            (None, Some(kind)) => {
                let generator = match kind {
                    GeneratorKind::ExpCircle => PathGenerator::ExpCircle {
                        base: self.vector("/path/base", &need(p.base.as_ref(), "base")?)?,
                        omega: p.omega.unwrap_or(1.0),
                    },
                    GeneratorKind::Linear => PathGenerator::Linear {
                        offset: self.vector("/path/offset", &need(p.offset.as_ref(), "offset")?)?,
                        slope: self.vector("/path/slope", &need(p.slope.as_ref(), "slope")?)?,
                    },
                };
                Ok(PathSpec::Generated {
                    a: p.a,
                    b: p.b,
                    n: p.n.unwrap_or(revtri_core::quadrature::DEFAULT_NODES),
                    generator,
                })
            }
        }
    }
}

fn real_scalar(pointer: &str, c: &CoordRepr) -> Result<f64, SchemaError> {
    match c {
        CoordRepr::Scalar(Cx(z)) if z.im == 0.0 => Ok(z.re),
        _ => Err(SchemaError::new(pointer, "expected a real number")),
    }
}

impl InstanceFile {
    pub fn space(&self) -> Result<ModuleSpace, SchemaError> {
        ModuleSpace::new(self.algebra.clone(), self.rank, self.action).map_err(|e| {
            let pointer = if self.rank == 0 { "/rank" } else { "/action" };
            SchemaError::new(pointer, e.to_string())
        })
    }

    /// Decodes all vectors and checks that ranks and shapes agree.
    pub fn resolve(&self) -> Result<Resolved, SchemaError> {
        let space = self.space()?;
        let mut d = Decoder {
            space: &space,
            reference: None,
        };
        let family = match &self.family {
            Some(f) => {
                let members = d.vectors("/family/members", &f.members)?;
                Some(OrthoFamily::new(&space, members, f.strict).map_err(|e| SchemaError::new("/family", e.to_string()))?)
            }
            None => None,
        };
        let e = self.e.as_ref().map(|v| d.vector("/e", v)).transpose()?;
        let xs = self.xs.as_ref().map(|v| d.vectors("/xs", v)).transpose()?;
        let path = self.path.as_ref().map(|p| d.path(p)).transpose()?;
        let a = self
            .a
            .as_ref()
            .map(|c| c.to_element(space.algebra()).map_err(|e| SchemaError::new("/a", e.to_string())))
            .transpose()?;
        Ok(Resolved {
            space,
            e,
            family,
            xs,
            a,
            path,
        })
    }

    fn bounds_field<'a>(
        &'a self,
        name: &str,
        field: impl Fn(&'a BoundsFile) -> Option<&'a CoordRepr>,
    ) -> Result<Option<&'a CoordRepr>, SchemaError> {
        let Some(b) = &self.bounds else { return Ok(None) };
        field(b).map(Some).ok_or_else(|| missing(&format!("/bounds/{name}")))
    }

    /// `k₁, k₂` as real numbers, if bounds are given.
    pub fn scalar_bounds(&self) -> Result<Option<ScalarBounds>, SchemaError> {
        let (Some(k1), Some(k2)) = (self.bounds_field("k1", |b| b.k1.as_ref())?, self.bounds_field("k2", |b| b.k2.as_ref())?) else {
            return Ok(None);
        };
        Ok(Some(ScalarBounds {
            k1: real_scalar("/bounds/k1", k1)?,
            k2: real_scalar("/bounds/k2", k2)?,
        }))
    }

    /// `k₁, k₂` as algebra elements, if bounds are given.
    pub fn hermitian_bounds(&self) -> Result<Option<HermitianBounds>, SchemaError> {
        let (Some(k1), Some(k2)) = (self.bounds_field("k1", |b| b.k1.as_ref())?, self.bounds_field("k2", |b| b.k2.as_ref())?) else {
            return Ok(None);
        };
        let el = |p: &str, c: &CoordRepr| c.to_element(&self.algebra).map_err(|e| SchemaError::new(p, e.to_string()));
        Ok(Some(HermitianBounds {
            k1: el("/bounds/k1", k1)?,
            k2: el("/bounds/k2", k2)?,
        }))
    }

    pub fn family_bounds(&self) -> Result<Option<FamilyBounds>, SchemaError> {
        let Some(b) = &self.bounds else { return Ok(None) };
        let r = b.r.clone().ok_or_else(|| missing("/bounds/r"))?;
        let rho = b.rho.clone().ok_or_else(|| missing("/bounds/rho"))?;
        if r.len() != rho.len() {
            return Err(SchemaError::new(
                "/bounds/rho",
                format!("/bounds/rho has {} entries but /bounds/r has {}", rho.len(), r.len()),
            ));
        }
        Ok(Some(FamilyBounds { r, rho }))
    }

    pub fn additive_bounds(&self) -> Result<Option<AdditiveBounds>, SchemaError> {
        let Some(b) = &self.bounds else { return Ok(None) };
        let m = b.m.clone().ok_or_else(|| missing("/bounds/m"))?;
        Ok(Some(AdditiveBounds { m }))
    }

    /// Replaces the vectors with `xs`, written in the file's coordinate form.
    pub fn with_xs(&self, xs: &[ModuleVector]) -> InstanceFile {
        let mut out = self.clone();
        out.xs = Some(
            xs.iter()
                .map(|x| x.coords().iter().map(CoordRepr::from_element).collect())
                .collect(),
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1, "e": [1], "xs": [[[3, 4]]]}"#;

    #[test]
    fn minimal_scalar_instance() {
        let f = parse_instance(MINIMAL.as_bytes()).unwrap();
        let r = f.resolve().unwrap();
        assert_eq!(r.xs().unwrap()[0].coords()[0].get(0, 0), Complex64::new(3.0, 4.0));
        assert_eq!(r.e().unwrap().norm(), 1.0);
        assert!(r.family().is_err());
    }

    #[test]
    fn round_trip_is_semantically_identical() {
        let f = parse_instance(MINIMAL.as_bytes()).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(parse_instance(text.as_bytes()).unwrap(), f);
    }

    #[test]
    fn full_precision_survives() {
        let x = 0.1f64 + 0.2;
        let src = format!(r#"{{"version": 1, "algebra": {{"blocks": [1]}}, "rank": 1, "xs": [[[{x:?}, 0]]]}}"#);
        let f = parse_instance(src.as_bytes()).unwrap();
        let back = parse_instance(serde_json::to_string(&f).unwrap().as_bytes()).unwrap();
        let v = back.resolve().unwrap().xs.unwrap()[0].coords()[0].get(0, 0).re;
        assert_eq!(v.to_bits(), x.to_bits());
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let bad = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1, "xs": [[[3, 4]], [["x", 0]]]}"#;
        let err = parse_instance(bad.as_bytes()).unwrap_err();
        assert!(err.pointer.starts_with("/xs/1"), "{err}");

        let err = parse_instance(br#"{"version": 1, "rank": 1}"#).unwrap_err();
        assert!(err.message.contains("algebra"), "{err}");

        let err = parse_instance(br#"{"version": 2, "algebra": {"blocks": [1]}, "rank": 1}"#).unwrap_err();
        assert_eq!(err.pointer, "/version");

        let err = parse_instance(br#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1, "extra": 0}"#).unwrap_err();
        assert!(err.message.contains("extra"), "{err}");
    }

    #[test]
    fn rank_mismatch_names_both_paths() {
        let src = r#"{
            "version": 1, "algebra": {"blocks": [1]}, "rank": 2,
            "family": {"members": [[1, 0], [0, 1]]},
            "xs": [[1, 2], [1, 2, 3]]
        }"#;
        let err = parse_instance(src.as_bytes()).unwrap().resolve().unwrap_err();
        assert_eq!(err.pointer, "/xs/1");
        assert!(err.message.contains("/xs/1") && err.message.contains("/family/members/0"), "{err}");

        let src = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 2, "xs": [[1]]}"#;
        let err = parse_instance(src.as_bytes()).unwrap().resolve().unwrap_err();
        assert!(err.message.contains("/rank"), "{err}");
    }

    #[test]
    fn shape_errors_point_at_coordinates() {
        let src = r#"{"version": 1, "algebra": {"blocks": [2]}, "rank": 1, "xs": [[[[1, 0]]]]}"#;
        let err = parse_instance(src.as_bytes()).unwrap().resolve().unwrap_err();
        assert_eq!(err.pointer, "/xs/0/0");
    }

    #[test]
    fn bounds_by_theorem() {
        let src = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1,
                      "bounds": {"k1": 0.6, "k2": [0.8, 0]}}"#;
        let f = parse_instance(src.as_bytes()).unwrap();
        assert_eq!(f.scalar_bounds().unwrap(), Some(ScalarBounds { k1: 0.6, k2: 0.8 }));
        assert_eq!(f.family_bounds().unwrap_err().pointer, "/bounds/r");

        let src = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1, "bounds": {"k1": [0.6, 1]}}"#;
        let f = parse_instance(src.as_bytes()).unwrap();
        assert_eq!(f.scalar_bounds().unwrap_err().pointer, "/bounds/k2");
    }

    #[test]
    fn path_forms() {
        let src = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1,
                      "path": {"a": 0, "b": 1, "generator": "exp-circle", "base": [1]}}"#;
        let r = parse_instance(src.as_bytes()).unwrap().resolve().unwrap();
        assert!(matches!(r.path, Some(PathSpec::Generated { n: 1024, .. })));

        let src = r#"{"version": 1, "algebra": {"blocks": [1]}, "rank": 1,
                      "path": {"a": 0, "b": 1, "generator": "linear", "offset": [1]}}"#;
        let err = parse_instance(src.as_bytes()).unwrap().resolve().unwrap_err();
        assert_eq!(err.pointer, "/path/slope");
    }
}
