use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::AlgebraShape;
use crate::error::{Error, Result};
use crate::json::{Cx, MatrixRepr};

/// Relative tolerance used to decide whether an input is hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// An element of a block-diagonal C*-algebra, stored as a dense row-major
/// `d × d` complex matrix whose entries vanish outside the block pattern.
///
/// The arithmetic operators panic when the operands live in different
/// algebras; checked entry points validate shapes first.
#[derive(Clone, PartialEq)]
pub struct Element {
    shape: AlgebraShape,
    data: Vec<Complex64>,
}

impl Element {
    pub fn zeros(shape: &AlgebraShape) -> Self {
        let d = shape.dim();
        Element {
            shape: shape.clone(),
            data: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }

    /// The unit `1`.
    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::scalar(shape, Complex64::new(1.0, 0.0))
    }

    /// `λ·1`.
    pub fn scalar(shape: &AlgebraShape, lambda: Complex64) -> Self {
        let mut e = Self::zeros(shape);
        let d = shape.dim();
        for i in 0..d {
            e.data[i * d + i] = lambda;
        }
        e
    }

    pub fn real_scalar(shape: &AlgebraShape, lambda: f64) -> Self {
        Self::scalar(shape, Complex64::new(lambda, 0.0))
    }

    pub fn from_real_diag(shape: &AlgebraShape, diag: &[f64]) -> Result<Self> {
        if diag.len() != shape.dim() {
            return Err(Error::input(format!(
                "diagonal has {} entries, algebra dimension is {}",
                diag.len(),
                shape.dim()
            )));
        }
        let mut e = Self::zeros(shape);
        let d = shape.dim();
        for (i, &v) in diag.iter().enumerate() {
            e.data[i * d + i] = Complex64::new(v, 0.0);
        }
        Ok(e)
    }

    /// Builds an element from full `d × d` rows, rejecting nonzero entries
    /// outside the block pattern.
    pub fn from_rows(shape: &AlgebraShape, rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = shape.dim();
        if rows.len() != d {
            return Err(Error::input(format!(
                "matrix has {} rows, algebra dimension is {d}",
                rows.len()
            )));
        }
        let mut data = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::input(format!(
                    "row {i} has {} entries, algebra dimension is {d}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::input(format!("entry ({i},{j}) is not finite")));
                }
                if !shape.in_pattern(i, j) && v != Complex64::new(0.0, 0.0) {
                    return Err(Error::input(format!(
                        "entry ({i},{j}) lies outside the block pattern {shape} but is nonzero"
                    )));
                }
                data.push(v);
            }
        }
        Ok(Element {
            shape: shape.clone(),
            data,
        })
    }

    /// Builds an element entry by entry; positions outside the pattern are
    /// never queried and stay zero.
    pub fn from_fn(shape: &AlgebraShape, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut e = Self::zeros(shape);
        for r in shape.block_ranges() {
            for i in r.clone() {
                for j in r.clone() {
                    e.data[i * shape.dim() + j] = f(i, j);
                }
            }
        }
        e
    }

    pub fn from_repr(shape: &AlgebraShape, repr: &MatrixRepr) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = repr
            .iter()
            .map(|row| row.iter().map(|c| c.0).collect())
            .collect();
        Self::from_rows(shape, &rows)
    }

    pub fn to_repr(&self) -> MatrixRepr {
        self.rows()
            .into_iter()
            .map(|row| row.into_iter().map(Cx).collect())
            .collect()
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim()).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(&self.shape);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Element {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.shape, other.shape, "elements of different algebras");
        Element {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape, "elements of different algebras");
        let d = self.dim();
        let mut out = Self::zeros(&self.shape);
        for r in self.shape.block_ranges() {
            for i in r.clone() {
                for k in r.clone() {
                    let a = self.data[i * d + k];
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in r.clone() {
                        out.data[i * d + j] += a * other.data[k * d + j];
                    }
                }
            }
        }
        out
    }

    /// `(Re a, Im a) = ((a + a*)/2, (a − a*)/(2i))`; both parts are hermitian.
    pub fn re_im_parts(&self) -> (Element, Element) {
        let adj = self.adjoint();
        let re = (self + &adj).scale_real(0.5);
        let im = (self - &adj).scale(Complex64::new(0.0, -0.5));
        (re, im)
    }

    pub fn re_part(&self) -> Element {
        self.re_im_parts().0
    }

    pub fn im_part(&self) -> Element {
        self.re_im_parts().1
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation `|a_ij − conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.max_abs().max(1.0)
    }

    pub(crate) fn require_hermitian(&self, what: &str) -> Result<()> {
        if self.is_hermitian(HERMITIAN_TOL) {
            Ok(())
        } else {
            Err(Error::input(format!(
                "{what} is not hermitian (defect {:e})",
                self.hermitian_defect()
            )))
        }
    }

    /// `(a + a*)/2`, exactly hermitian.
    pub fn hermitian_part(&self) -> Element {
        self.re_part()
    }

    /// `ab − ba`.
    pub fn commutator(&self, other: &Element) -> Element {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({:?}, [", self.shape)?;
        for (i, row) in self.data.chunks(self.dim()).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{v}")?;
            }
        }
        f.write_str("])")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                let f: fn(&Element, &Element) -> Element = $body;
                f(self, rhs)
            }
        }
        impl $trait<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
        impl $trait<Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
binop!(Mul, mul, |a, b| a.matmul(b));

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map(|v| -v)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}
