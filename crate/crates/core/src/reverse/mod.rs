//! Verifiers, best-constant extractors and equality constructors for the
//! multiplicative and additive reverse triangle inequalities
//!
//! ```text
//! (k₁² + k₂²)^{1/2} Σ‖x_j‖ ≤ ‖Σ x_j‖
//! [Σ_k (r_k² + ρ_k²)]^{1/2} Σ‖x_j‖ ≤ ‖Σ x_j‖        (and ≤ |Σ x_j| in two-sided modules)
//! Σ‖x_j‖ ≤ m^{-1/2} ‖Σ x_j‖ + m^{-1} Σ_j Σ_k M_{jk}
//! ```
//!
//! Every verifier returns a [`Certificate`](crate::Certificate); failed
//! hypotheses are recorded there rather than raised as errors.

mod additive;
mod bounds;
mod family;
mod multiplicative;

pub use additive::{build_additive_equality_instance, extract_additive_bounds, verify_additive};
pub use bounds::{AdditiveBounds, FamilyBounds, HermitianBounds, HermitianBoundsRepr, ScalarBounds};
pub use family::{build_equality_instance, extract_family_bounds, verify_family_modulus, verify_family_norm};
pub(crate) use multiplicative::{check_commutes, check_sign_coherence};
pub use multiplicative::{
    extract_hermitian_bounds, extract_scalar_bounds, verify_multiplicative_hermitian,
    verify_multiplicative_scalar,
};

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::module::{ModuleSpace, ModuleVector};

fn check_vectors(space: &ModuleSpace, xs: &[ModuleVector]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::input("at least one vector x_j is required"));
    }
    if let Some(j) = xs.iter().position(|x| x.space() != space) {
        return Err(Error::input(format!("x_{j} lives in a different module")));
    }
    Ok(())
}

/// Norms `‖x_j‖`, rejecting zero vectors (extraction divides by them).
fn nonzero_norms(xs: &[ModuleVector]) -> Result<Vec<f64>> {
    xs.iter()
        .enumerate()
        .map(|(j, x)| {
            let n = x.norm();
            if n == 0.0 {
                Err(Error::input(format!("x_{j} is zero; bounds are undefined")))
            } else {
                Ok(n)
            }
        })
        .collect()
}

/// `max(0, min_j λ_min(part_j) / ‖x_j‖)`.
fn min_ratio(parts: &[Element], norms: &[f64]) -> f64 {
    parts
        .iter()
        .zip(norms)
        .map(|(p, n)| p.lambda_min() / n)
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}
