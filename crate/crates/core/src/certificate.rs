//! Machine-readable verification outcomes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{loewner_compare, Element};
use crate::error::{Error, Result};
use crate::json::MatrixRepr;

/// Equality witnesses must reproduce `Σx_j` to this fraction of `Σ‖x_j‖`.
pub const WITNESS_TOL: f64 = 1e-8;

/// Statements the toolkit can certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// `½(aa* + a*a) = (Re a)² + (Im a)²`.
    Diamond,
    /// `⟨y,x⟩⟨x,y⟩ ≤ ‖x‖²⟨y,y⟩`.
    CauchySchwarz,
    /// `Σ_k |⟨e_k,x⟩|² ≤ |x|²` for an orthogonal family.
    Bessel,
    /// Reverse triangle inequality with real constants `k₁, k₂`.
    MultScalar,
    /// Reverse triangle inequality with hermitian constants.
    MultHermitian,
    /// Reverse triangle inequality against an orthogonal family, norm form.
    FamilyNorm,
    /// Reverse triangle inequality against an orthogonal family, modulus form.
    FamilyModulus,
    /// Additive reverse triangle inequality.
    Additive,
    /// Sampled-path version of the hermitian-constant inequality.
    Integral,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Diamond,
        TheoremId::CauchySchwarz,
        TheoremId::Bessel,
        TheoremId::MultScalar,
        TheoremId::MultHermitian,
        TheoremId::FamilyNorm,
        TheoremId::FamilyModulus,
        TheoremId::Additive,
        TheoremId::Integral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Diamond => "diamond",
            TheoremId::CauchySchwarz => "cauchy-schwarz",
            TheoremId::Bessel => "bessel",
            TheoremId::MultScalar => "mult-scalar",
            TheoremId::MultHermitian => "mult-hermitian",
            TheoremId::FamilyNorm => "family-norm",
            TheoremId::FamilyModulus => "family-modulus",
            TheoremId::Additive => "additive",
            TheoremId::Integral => "integral",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown theorem `{s}`")))
    }
}

/// One checked hypothesis. `margin` is signed: for Löwner hypotheses it is
/// `λ_min(rhs − lhs)`, for scalar ones `rhs − lhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precondition {
    pub name: String,
    pub ok: bool,
    pub margin: f64,
}

/// A side of an inequality: a real number or an algebra element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Scalar(f64),
    Matrix(MatrixRepr),
}

impl Quantity {
    /// Entries as a dense matrix; a scalar becomes `1 × 1`.
    pub fn to_matrix(&self) -> Vec<Vec<num_complex::Complex64>> {
        match self {
            Quantity::Scalar(v) => vec![vec![num_complex::Complex64::new(*v, 0.0)]],
            Quantity::Matrix(m) => m.iter().map(|r| r.iter().map(|c| c.0).collect()).collect(),
        }
    }

    /// Largest entrywise distance to `other`; infinite on a shape mismatch.
    pub fn distance(&self, other: &Quantity) -> f64 {
        let a = self.to_matrix();
        let b = other.to_matrix();
        if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.len() != y.len()) {
            return f64::INFINITY;
        }
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Scalar form `‖(k₁² + k₂²)^{1/2}‖·Σ‖x_j‖ ≤ ‖Σx_j‖` of a Löwner-form conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarReading {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Hypotheses hold and so does the conclusion.
    Verified,
    /// Hypotheses hold but the conclusion fails beyond tolerance.
    Violated,
    /// At least one hypothesis fails.
    PreconditionFailed,
}

/// Verification record for one instance of one statement.
///
/// `slack` is `rhs − lhs` for scalar conclusions and `λ_min(rhs − lhs)` for
/// Löwner-order conclusions. The conclusion holds when
/// `slack ≥ −tol·scale` with `scale = max(1, ‖lhs‖, ‖rhs‖)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: TheoremId,
    pub preconditions_ok: bool,
    pub preconditions: Vec<Precondition>,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub slack: f64,
    pub scale: f64,
    pub relative_slack: f64,
    pub tol: f64,
    pub holds: bool,
    pub equality: bool,
    pub witness_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar_reading: Option<ScalarReading>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        if !self.preconditions_ok {
            Verdict::PreconditionFailed
        } else if self.holds {
            Verdict::Verified
        } else {
            Verdict::Violated
        }
    }

    pub fn failed_preconditions(&self) -> impl Iterator<Item = &Precondition> {
        self.preconditions.iter().filter(|p| !p.ok)
    }

    pub fn precondition(&self, name: &str) -> Option<&Precondition> {
        self.preconditions.iter().find(|p| p.name == name)
    }

    /// Largest relative difference `|a − b| / max(1, |a|, |b|)` over the
    /// numeric fields shared with `other`, or a description of the first
    /// structural mismatch (theorem, precondition names or flags, verdicts).
    /// Notes are not compared.
    pub fn deviation(&self, other: &Certificate) -> std::result::Result<f64, String> {
        let rel = |a: f64, b: f64| {
            if a == b {
                0.0
            } else {
                (a - b).abs() / a.abs().max(b.abs()).max(1.0)
            }
        };
        if self.theorem != other.theorem {
            return Err(format!("theorem {} vs {}", self.theorem, other.theorem));
        }
        if self.preconditions.len() != other.preconditions.len() {
            return Err(format!(
                "{} vs {} preconditions",
                self.preconditions.len(),
                other.preconditions.len()
            ));
        }
        let mut dev = 0.0f64;
        for (p, q) in self.preconditions.iter().zip(&other.preconditions) {
            if p.name != q.name || p.ok != q.ok {
                return Err(format!("precondition {}={} vs {}={}", p.name, p.ok, q.name, q.ok));
            }
            dev = dev.max(rel(p.margin, q.margin));
        }
        let flags = [
            ("preconditions_ok", self.preconditions_ok, other.preconditions_ok),
            ("holds", self.holds, other.holds),
            ("equality", self.equality, other.equality),
        ];
        if let Some((name, a, b)) = flags.iter().find(|(_, a, b)| a != b) {
            return Err(format!("{name}: {a} vs {b}"));
        }
        let side = |a: &Quantity, b: &Quantity| {
            let d = a.distance(b);
            let size = a.to_matrix().iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
            d / size
        };
        dev = dev.max(side(&self.lhs, &other.lhs)).max(side(&self.rhs, &other.rhs));
        for (a, b) in [
            (self.slack, other.slack),
            (self.scale, other.scale),
            (self.relative_slack, other.relative_slack),
            (self.tol, other.tol),
        ] {
            dev = dev.max(rel(a, b));
        }
        match (self.witness_residual, other.witness_residual) {
            (Some(a), Some(b)) => dev = dev.max(rel(a, b)),
            (None, None) => {}
            _ => return Err("witness residual present on one side only".into()),
        }
        match (self.scalar_reading, other.scalar_reading) {
            (Some(a), Some(b)) => dev = dev.max(rel(a.lhs, b.lhs)).max(rel(a.rhs, b.rhs)).max(rel(a.slack, b.slack)),
            (None, None) => {}
            _ => return Err("scalar reading present on one side only".into()),
        }
        Ok(dev)
    }

    pub(crate) fn assemble(
        theorem: TheoremId,
        checks: Checks,
        lhs: Quantity,
        rhs: Quantity,
        slack: f64,
        scale: f64,
    ) -> Self {
        let tol = checks.tol;
        Certificate {
            theorem,
            preconditions_ok: checks.items.iter().all(|p| p.ok),
            preconditions: checks.items,
            lhs,
            rhs,
            slack,
            scale,
            relative_slack: slack / scale,
            tol,
            holds: slack >= -tol * scale,
            equality: false,
            witness_residual: None,
            scalar_reading: None,
            notes: checks.notes,
        }
    }

    /// Certificate for the scalar conclusion `lhs ≤ rhs`.
    pub(crate) fn scalar(theorem: TheoremId, checks: Checks, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Self::assemble(theorem, checks, Quantity::Scalar(lhs), Quantity::Scalar(rhs), rhs - lhs, scale)
    }

    /// Certificate for the Löwner-order conclusion `lhs ≤ rhs`.
    pub(crate) fn operator(theorem: TheoremId, checks: Checks, lhs: &Element, rhs: &Element) -> Self {
        let slack = (rhs - lhs).lambda_min();
        let scale = lhs.hermitian_norm().max(rhs.hermitian_norm()).max(1.0);
        Self::assemble(
            theorem,
            checks,
            Quantity::Matrix(lhs.to_repr()),
            Quantity::Matrix(rhs.to_repr()),
            slack,
            scale,
        )
    }

    /// Certificate for an identity whose residual must stay below `tol`.
    pub(crate) fn identity(theorem: TheoremId, checks: Checks, lhs: &Element, rhs: &Element) -> Self {
        let residual = (lhs - rhs).op_norm();
        let mut cert = Self::assemble(
            theorem,
            checks,
            Quantity::Matrix(lhs.to_repr()),
            Quantity::Matrix(rhs.to_repr()),
            -residual,
            1.0,
        );
        cert.equality = cert.holds;
        cert.witness_residual = Some(residual);
        cert
    }

    /// Equality from the slack alone, for statements without a witness.
    pub(crate) fn with_slack_equality(mut self) -> Self {
        self.equality = self.preconditions_ok && self.relative_slack.abs() <= self.tol;
        self
    }

    /// Equality requires both a vanishing relative slack and a witness
    /// residual of at most `WITNESS_TOL·witness_scale`.
    pub(crate) fn with_witness(mut self, residual: f64, witness_scale: f64) -> Self {
        self.witness_residual = Some(residual);
        self.equality = self.preconditions_ok
            && self.relative_slack.abs() <= self.tol
            && residual <= WITNESS_TOL * witness_scale;
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Accumulates hypothesis checks for a certificate.
#[derive(Debug, Clone)]
pub(crate) struct Checks {
    tol: f64,
    items: Vec<Precondition>,
    notes: Vec<String>,
}

impl Checks {
    pub fn new(tol: f64) -> Self {
        Checks {
            tol,
            items: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn flag(&mut self, name: impl Into<String>, ok: bool, margin: f64) -> bool {
        self.items.push(Precondition {
            name: name.into(),
            ok,
            margin,
        });
        ok
    }

    /// Records `a ≤ b` in the Löwner order.
    pub fn loewner(&mut self, name: impl Into<String>, a: &Element, b: &Element) -> Result<bool> {
        let chk = loewner_compare(a, b, self.tol)?;
        Ok(self.flag(name, chk.holds, chk.gap))
    }

    /// Records the scalar inequality `a ≤ b` with relative tolerance.
    pub fn scalar_leq(&mut self, name: impl Into<String>, a: f64, b: f64) -> bool {
        let threshold = self.tol * a.abs().max(b.abs()).max(1.0);
        self.flag(name, b - a >= -threshold, b - a)
    }
}

/// Checks the identity `½(aa* + a*a) = (Re a)² + (Im a)²`; the certificate
/// holds when the residual operator norm is at most `tol`.
pub fn check_diamond(a: &Element, tol: f64) -> Certificate {
    let adj = a.adjoint();
    let lhs = (&(a * &adj) + &(&adj * a)).scale_real(0.5);
    let (re, im) = a.re_im_parts();
    let rhs = &(&re * &re) + &(&im * &im);
    Certificate::identity(TheoremId::Diamond, Checks::new(tol), &lhs, &rhs)
}
