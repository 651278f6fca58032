//! Numerics for finite-dimensional Hilbert C*-modules and their reverse
//! triangle inequalities.
//!
//! The algebra is a block-diagonal matrix algebra `⊕ᵢ M_{dᵢ}(ℂ)` and modules
//! are the free modules `A^m` with `⟨x, y⟩ = Σᵢ xᵢ* yᵢ`. The [`reverse`]
//! verifiers check the hypotheses of each inequality in the Löwner order and
//! return a [`Certificate`]; [`quadrature`] handles sampled paths, [`fuzz`]
//! drives randomized soundness and sharpness checks, and [`scalar`] is an
//! independent plain complex Hilbert-space implementation used as an oracle.

pub mod algebra;
pub mod certificate;
pub mod error;
pub mod fuzz;
pub mod json;
pub mod module;
pub mod quadrature;
pub mod random;
pub mod reverse;
pub mod scalar;

pub use algebra::{loewner_leq, AlgebraShape, Element, Spectrum, DEFAULT_TOL};
pub use certificate::{check_diamond, Certificate, Precondition, Quantity, TheoremId, Verdict};
pub use error::{Error, Result};
pub use module::{make_ortho_family, Action, ModuleSpace, ModuleVector, OrthoFamily};
pub use reverse::{AdditiveBounds, FamilyBounds, HermitianBounds, ScalarBounds};
