use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModuleSpace;
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::json::MatrixRepr;

/// Tolerance for positivity of `⟨x, x⟩` when taking `|x|`.
pub const GRAM_TOL: f64 = 1e-10;

/// A vector of the module `A^m`: `m` coordinates in the algebra.
///
/// The inner product `⟨x, y⟩ = Σᵢ xᵢ*·yᵢ` is conjugate-linear in the **first**
/// argument and satisfies `⟨x, y·a⟩ = ⟨x, y⟩·a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct ModuleVector {
    space: ModuleSpace,
    coords: Vec<Element>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    space: ModuleSpace,
    coords: Vec<MatrixRepr>,
}

impl TryFrom<VectorRepr> for ModuleVector {
    type Error = Error;

    fn try_from(r: VectorRepr) -> Result<Self> {
        ModuleVector::from_reprs(&r.space, &r.coords)
    }
}

impl From<ModuleVector> for VectorRepr {
    fn from(v: ModuleVector) -> Self {
        VectorRepr {
            coords: v.coord_reprs(),
            space: v.space,
        }
    }
}

impl ModuleVector {
    pub fn zeros(space: &ModuleSpace) -> Self {
        ModuleVector {
            space: space.clone(),
            coords: vec![Element::zeros(space.algebra()); space.rank()],
        }
    }

    pub fn from_coords(space: &ModuleSpace, coords: Vec<Element>) -> Result<Self> {
        if coords.len() != space.rank() {
            return Err(Error::input(format!(
                "vector has {} coordinates, module rank is {}",
                coords.len(),
                space.rank()
            )));
        }
        if let Some(i) = coords.iter().position(|c| c.shape() != space.algebra()) {
            return Err(Error::input(format!("coordinate {i} lives in a different algebra")));
        }
        Ok(ModuleVector {
            space: space.clone(),
            coords,
        })
    }

    pub fn from_reprs(space: &ModuleSpace, coords: &[MatrixRepr]) -> Result<Self> {
        let elems = coords
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Element::from_repr(space.algebra(), m)
                    .map_err(|e| Error::input(format!("coordinate {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(space, elems)
    }

    pub fn coord_reprs(&self) -> Vec<MatrixRepr> {
        self.coords.iter().map(Element::to_repr).collect()
    }

    /// The vector with `a` in slot `k` and zeros elsewhere.
    pub fn slot(space: &ModuleSpace, k: usize, a: Element) -> Result<Self> {
        if k >= space.rank() {
            return Err(Error::input(format!("slot {k} out of range for rank {}", space.rank())));
        }
        let mut v = Self::zeros(space);
        if a.shape() != space.algebra() {
            return Err(Error::input("slot element lives in a different algebra"));
        }
        v.coords[k] = a;
        Ok(v)
    }

    /// Vector over `A = ℂ` from complex coordinates.
    pub fn from_complex(space: &ModuleSpace, values: &[Complex64]) -> Result<Self> {
        if space.algebra().dim() != 1 {
            return Err(Error::input("complex coordinates need the scalar algebra"));
        }
        let coords = values
            .iter()
            .map(|&v| Element::scalar(space.algebra(), v))
            .collect();
        Self::from_coords(space, coords)
    }

    pub fn space(&self) -> &ModuleSpace {
        &self.space
    }

    pub fn coords(&self) -> &[Element] {
        &self.coords
    }

    /// `⟨self, other⟩ = Σᵢ selfᵢ*·otherᵢ`. Panics across spaces; see [`inner`].
    pub fn inner(&self, other: &ModuleVector) -> Element {
        assert_eq!(self.space, other.space, "vectors of different modules");
        let mut acc = Element::zeros(self.space.algebra());
        for (a, b) in self.coords.iter().zip(&other.coords) {
            acc = acc + &a.adjoint() * b;
        }
        acc
    }

    /// `⟨x, x⟩`.
    pub fn gram(&self) -> Element {
        self.inner(self)
    }

    /// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.gram().lambda_max().max(0.0).sqrt()
    }

    /// `|x| = ⟨x, x⟩^{1/2}`.
    pub fn modulus(&self) -> Result<Element> {
        self.gram().psd_sqrt(GRAM_TOL).map_err(|e| match e {
            Error::Positivity { lambda_min } => {
                Error::Internal(format!("⟨x,x⟩ has eigenvalue {lambda_min:e}"))
            }
            other => other,
        })
    }

    /// Right action `x·a`.
    pub fn right_mul(&self, a: &Element) -> ModuleVector {
        ModuleVector {
            space: self.space.clone(),
            coords: self.coords.iter().map(|c| c * a).collect(),
        }
    }

    /// Coordinatewise left action `a·x`; two-sided modules only.
    pub fn left_mul(&self, a: &Element) -> Result<ModuleVector> {
        if !self.space.is_two_sided() {
            return Err(Error::capability("left action on a right-only module"));
        }
        Ok(ModuleVector {
            space: self.space.clone(),
            coords: self.coords.iter().map(|c| a * c).collect(),
        })
    }

    pub fn scale(&self, c: Complex64) -> ModuleVector {
        ModuleVector {
            space: self.space.clone(),
            coords: self.coords.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> ModuleVector {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `Σ xs`, or zero in `space` for an empty list.
    pub fn sum<'a>(space: &ModuleSpace, xs: impl IntoIterator<Item = &'a ModuleVector>) -> ModuleVector {
        xs.into_iter().fold(Self::zeros(space), |acc, x| acc + x)
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(Element::max_abs).fold(0.0, f64::max)
    }
}

/// Checked inner product.
pub fn inner(x: &ModuleVector, y: &ModuleVector) -> Result<Element> {
    if x.space != y.space {
        return Err(Error::input("inner product of vectors from different modules"));
    }
    Ok(x.inner(y))
}

/// `(|x|, ‖x‖)`.
pub fn modulus_and_norm(x: &ModuleVector) -> Result<(Element, f64)> {
    Ok((x.modulus()?, x.norm()))
}

impl Add<&ModuleVector> for &ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: &ModuleVector) -> ModuleVector {
        assert_eq!(self.space, rhs.space, "vectors of different modules");
        ModuleVector {
            space: self.space.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add<&ModuleVector> for ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: &ModuleVector) -> ModuleVector {
        &self + rhs
    }
}

impl Add<ModuleVector> for ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: ModuleVector) -> ModuleVector {
        &self + &rhs
    }
}

impl Sub<&ModuleVector> for &ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: &ModuleVector) -> ModuleVector {
        assert_eq!(self.space, rhs.space, "vectors of different modules");
        ModuleVector {
            space: self.space.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub<ModuleVector> for ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: ModuleVector) -> ModuleVector {
        &self - &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_inner_conjugates_first_slot() {
        let h = ModuleSpace::hilbert(1).unwrap();
        let x = ModuleVector::from_complex(&h, &[c(3.0, 4.0)]).unwrap();
        let y = ModuleVector::from_complex(&h, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(x.inner(&y).get(0, 0), c(3.0, -4.0));
        assert_eq!(y.inner(&x).get(0, 0), c(3.0, 4.0));
    }

    #[test]
    fn slot_vectors() {
        let s = ModuleSpace::right(AlgebraShape::full(2).unwrap(), 2).unwrap();
        let one = Element::identity(s.algebra());
        let e0 = ModuleVector::slot(&s, 0, one.clone()).unwrap();
        let e1 = ModuleVector::slot(&s, 1, one.clone()).unwrap();
        assert_eq!(e0.gram(), one);
        assert_eq!(e0.inner(&e1).max_abs(), 0.0);
        assert!(ModuleVector::slot(&s, 2, one).is_err());
    }

    #[test]
    fn modulus_and_norm_examples() {
        let h = ModuleSpace::hilbert(1).unwrap();
        let x = ModuleVector::from_complex(&h, &[c(3.0, 4.0)]).unwrap();
        let (m, n) = modulus_and_norm(&x).unwrap();
        assert!((m.get(0, 0) - c(5.0, 0.0)).norm() < 1e-14);
        assert!((n - 5.0).abs() < 1e-14);

        // A = M₂ as a module over itself
        let s = ModuleSpace::right(AlgebraShape::full(2).unwrap(), 1).unwrap();
        let d = Element::from_real_diag(s.algebra(), &[1.0, 2.0]).unwrap();
        let x = ModuleVector::from_coords(&s, vec![d.clone()]).unwrap();
        let (m, n) = modulus_and_norm(&x).unwrap();
        assert!((&m - &d).max_abs() < 1e-14);
        assert!((n - 2.0).abs() < 1e-14);

        let (m, n) = modulus_and_norm(&ModuleVector::zeros(&s)).unwrap();
        assert_eq!(m.max_abs(), 0.0);
        assert_eq!(n, 0.0);
    }

    #[test]
    fn left_action_needs_two_sided_module() {
        let s = ModuleSpace::right(AlgebraShape::full(2).unwrap(), 1).unwrap();
        let x = ModuleVector::zeros(&s);
        assert!(matches!(x.left_mul(&Element::identity(s.algebra())), Err(Error::Capability(_))));
    }

    #[test]
    fn checked_inner_rejects_mixed_spaces() {
        let a = ModuleVector::zeros(&ModuleSpace::hilbert(1).unwrap());
        let b = ModuleVector::zeros(&ModuleSpace::hilbert(2).unwrap());
        assert!(inner(&a, &b).is_err());
    }

    #[test]
    fn json_form() {
        let h = ModuleSpace::hilbert(2).unwrap();
        let x = ModuleVector::from_complex(&h, &[c(3.0, 4.0), c(0.0, -1.0)]).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(
            text,
            r#"{"space":{"algebra":{"blocks":[1]},"rank":2,"action":"two-sided"},"coords":[[[[3.0,4.0]]],[[[0.0,-1.0]]]]}"#
        );
        assert_eq!(serde_json::from_str::<ModuleVector>(&text).unwrap(), x);
    }
}
