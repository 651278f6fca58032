//! Block-diagonal C*-algebras `⊕ᵢ M_{dᵢ}(ℂ)` and their *-algebra numerics.

mod element;
mod jacobi;
mod shape;
mod spectral;

pub use element::{Element, HERMITIAN_TOL};
pub use jacobi::{eigh, MAX_SWEEPS, OFFDIAG_TOL};
pub use shape::AlgebraShape;
pub use spectral::{loewner_compare, loewner_leq, LoewnerCheck, Spectrum, DEFAULT_TOL};
