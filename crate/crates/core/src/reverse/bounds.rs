use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, Element};
use crate::error::{Error, Result};
use crate::json::MatrixRepr;

/// Real constants `k₁, k₂ ≥ 0` of the scalar multiplicative inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarBounds {
    pub k1: f64,
    pub k2: f64,
}

impl ScalarBounds {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 >= 0.0 && k2 >= 0.0) || !k1.is_finite() || !k2.is_finite() {
            return Err(Error::input(format!("scalar bounds must be finite and nonnegative, got ({k1}, {k2})")));
        }
        Ok(ScalarBounds { k1, k2 })
    }

    pub fn zero() -> Self {
        ScalarBounds { k1: 0.0, k2: 0.0 }
    }

    /// `(k₁² + k₂²)^{1/2}`.
    pub fn magnitude(&self) -> f64 {
        self.k1.hypot(self.k2)
    }
}

/// Hermitian algebra elements `k₁, k₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBounds {
    pub k1: Element,
    pub k2: Element,
}

/// Wire form of [`HermitianBounds`]; needs the algebra shape to decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianBoundsRepr {
    pub k1: MatrixRepr,
    pub k2: MatrixRepr,
}

impl HermitianBounds {
    pub fn new(k1: Element, k2: Element) -> Result<Self> {
        if k1.shape() != k2.shape() {
            return Err(Error::input("hermitian bounds from different algebras"));
        }
        Ok(HermitianBounds { k1, k2 })
    }

    /// `k₁ = κ₁·1`, `k₂ = κ₂·1`.
    pub fn from_scalars(shape: &AlgebraShape, b: ScalarBounds) -> Self {
        HermitianBounds {
            k1: Element::real_scalar(shape, b.k1),
            k2: Element::real_scalar(shape, b.k2),
        }
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self::from_scalars(shape, ScalarBounds::zero())
    }

    pub fn from_repr(shape: &AlgebraShape, repr: &HermitianBoundsRepr) -> Result<Self> {
        Self::new(Element::from_repr(shape, &repr.k1)?, Element::from_repr(shape, &repr.k2)?)
    }

    pub fn to_repr(&self) -> HermitianBoundsRepr {
        HermitianBoundsRepr {
            k1: self.k1.to_repr(),
            k2: self.k2.to_repr(),
        }
    }

    /// `k₁² + k₂²`.
    pub fn square_sum(&self) -> Element {
        &(&self.k1 * &self.k1) + &(&self.k2 * &self.k2)
    }

    pub fn scale(&self, t: f64) -> Self {
        HermitianBounds {
            k1: self.k1.scale_real(t),
            k2: self.k2.scale_real(t),
        }
    }
}

/// Constants `r_k, ρ_k` attached to the members of an orthogonal family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyBounds {
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
}

impl FamilyBounds {
    pub fn new(r: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if r.len() != rho.len() {
            return Err(Error::input(format!(
                "family bounds have {} values of r but {} of rho",
                r.len(),
                rho.len()
            )));
        }
        if r.iter().chain(&rho).any(|v| !v.is_finite()) {
            return Err(Error::input("family bounds must be finite"));
        }
        Ok(FamilyBounds { r, rho })
    }

    pub fn zero(m: usize) -> Self {
        FamilyBounds {
            r: vec![0.0; m],
            rho: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `Σ_k (r_k² + ρ_k²)`.
    pub fn square_sum(&self) -> f64 {
        self.r.iter().zip(&self.rho).map(|(r, p)| r * r + p * p).sum()
    }
}

/// Nonnegative defect bounds `M_{jk}` (row `j` = vector, column `k` = family member).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveBounds {
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
}

impl AdditiveBounds {
    pub fn new(m: Vec<Vec<f64>>) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::input("additive bounds must be finite"));
        }
        Ok(AdditiveBounds { m })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        AdditiveBounds {
            m: vec![vec![0.0; m]; n],
        }
    }

    /// `Σ_j Σ_k M_{jk}`.
    pub fn total(&self) -> f64 {
        self.m.iter().flatten().sum()
    }
}
