//! Spectral calculus on hermitian elements: spectra, square roots, norms and
//! the Löwner order. Decompositions run block by block so that functions of
//! an element stay exactly inside the block pattern.

use num_complex::Complex64;

use super::jacobi;
use super::{AlgebraShape, Element};
use crate::error::{Error, Result};

/// Default relative tolerance for Löwner-order hypotheses.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigen-decomposition `a = Q·Λ·Q*` of a hermitian element.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Row-major unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Complex64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `Q·Λ·Q*` as a dense row-major matrix.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.dim();
        let q = &self.eigenvectors;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| q[i * n + k] * self.eigenvalues[k] * q[j * n + k].conj())
                    .sum();
            }
        }
        out
    }
}

struct BlockEig {
    offset: usize,
    size: usize,
    values: Vec<f64>,
    vectors: Vec<Complex64>,
}

/// Outcome of comparing two hermitian elements in the Löwner order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoewnerCheck {
    /// `λ_min(b − a)`; nonnegative when `a ≤ b` holds exactly.
    pub gap: f64,
    /// The comparison holds when `gap ≥ −threshold`.
    pub threshold: f64,
    pub holds: bool,
}

impl Element {
    fn block_eigs(&self) -> Vec<BlockEig> {
        let d = self.dim();
        let entries = self.entries();
        self.shape()
            .block_ranges()
            .map(|r| {
                let size = r.len();
                let mut sub = Vec::with_capacity(size * size);
                for i in r.clone() {
                    for j in r.clone() {
                        sub.push(entries[i * d + j]);
                    }
                }
                let (values, vectors) = jacobi::eigh(size, &sub);
                BlockEig {
                    offset: r.start,
                    size,
                    values,
                    vectors,
                }
            })
            .collect()
    }

    /// Spectrum of a hermitian element; eigenvalues ascending.
    pub fn spectrum(&self) -> Result<Spectrum> {
        self.require_hermitian("spectrum input")?;
        let d = self.dim();
        let blocks = self.block_eigs();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d);
        for (b, blk) in blocks.iter().enumerate() {
            for k in 0..blk.size {
                pairs.push((blk.values[k], b, k));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut vectors = vec![Complex64::new(0.0, 0.0); d * d];
        for (col, &(_, b, k)) in pairs.iter().enumerate() {
            let blk = &blocks[b];
            for r in 0..blk.size {
                vectors[(blk.offset + r) * d + col] = blk.vectors[r * blk.size + k];
            }
        }
        Ok(Spectrum {
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            eigenvectors: vectors,
        })
    }

    /// Ascending eigenvalues of the hermitian part.
    pub(crate) fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.block_eigs().into_iter().flat_map(|b| b.values).collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Smallest eigenvalue of the hermitian part.
    pub fn lambda_min(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue of the hermitian part.
    pub fn lambda_max(&self) -> f64 {
        self.hermitian_eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Applies a real function to the spectrum of the hermitian part,
    /// `Q·f(Λ)·Q*`, block by block.
    pub(crate) fn apply_hermitian_fn(&self, f: impl Fn(f64) -> f64) -> Element {
        let shape: &AlgebraShape = self.shape();
        let d = shape.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for blk in self.block_eigs() {
            let n = blk.size;
            let fv: Vec<f64> = blk.values.iter().map(|&v| f(v)).collect();
            for i in 0..n {
                for j in 0..n {
                    let val: Complex64 = (0..n)
                        .map(|k| blk.vectors[i * n + k] * fv[k] * blk.vectors[j * n + k].conj())
                        .sum();
                    data[(blk.offset + i) * d + blk.offset + j] = val;
                }
            }
        }
        Element::from_fn(shape, |i, j| data[i * d + j]).hermitian_part()
    }

    /// Positive square root of a positive element.
    ///
    /// Eigenvalues in `[−tol·max(1, λ_max), 0)` are clamped to zero; anything
    /// more negative is a [`Error::Positivity`] carrying `λ_min`.
    pub fn psd_sqrt(&self, tol: f64) -> Result<Element> {
        self.require_hermitian("square root input")?;
        let vals = self.hermitian_eigenvalues();
        let lmin = vals.first().copied().unwrap_or(0.0);
        let lmax = vals.last().copied().unwrap_or(0.0);
        if lmin < -tol * lmax.max(1.0) {
            return Err(Error::Positivity { lambda_min: lmin });
        }
        Ok(self.apply_hermitian_fn(|v| v.max(0.0).sqrt()))
    }

    /// `|a| = (a*a)^{1/2}`.
    pub fn abs(&self) -> Element {
        (&self.adjoint() * self).apply_hermitian_fn(|v| v.max(0.0).sqrt())
    }

    /// Operator norm (largest singular value), `λ_max(a*a)^{1/2}`.
    pub fn op_norm(&self) -> f64 {
        (&self.adjoint() * self).lambda_max().max(0.0).sqrt()
    }

    /// Operator norm of a hermitian element, `max(|λ_min|, |λ_max|)`.
    pub(crate) fn hermitian_norm(&self) -> f64 {
        let vals = self.hermitian_eigenvalues();
        let lo = vals.first().copied().unwrap_or(0.0).abs();
        let hi = vals.last().copied().unwrap_or(0.0).abs();
        lo.max(hi)
    }
}

/// Compares hermitian `a` and `b`: `a ≤ b` holds when
/// `λ_min(b − a) ≥ −tol·max(1, ‖a‖, ‖b‖)`.
pub fn loewner_compare(a: &Element, b: &Element, tol: f64) -> Result<LoewnerCheck> {
    if a.shape() != b.shape() {
        return Err(Error::input("Löwner comparison across different algebras"));
    }
    a.require_hermitian("left Löwner operand")?;
    b.require_hermitian("right Löwner operand")?;
    let gap = (b - a).lambda_min();
    let threshold = tol * a.hermitian_norm().max(b.hermitian_norm()).max(1.0);
    Ok(LoewnerCheck {
        gap,
        threshold,
        holds: gap >= -threshold,
    })
}

/// `a ≤ b` in the Löwner order, within the relative tolerance `tol`.
pub fn loewner_leq(a: &Element, b: &Element, tol: f64) -> Result<bool> {
    loewner_compare(a, b, tol).map(|c| c.holds)
}
