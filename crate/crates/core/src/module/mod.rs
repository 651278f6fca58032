//! Hilbert modules `A^m` over a block-diagonal algebra `A`.

mod family;
mod lemmas;
mod space;
mod vector;

pub use family::{make_ortho_family, OrthoFamily, FAMILY_TOL};
pub use lemmas::{bessel_defect, cs_equality_reconstruct, cs_gap, BesselSide};
pub use space::{Action, ModuleSpace};
pub use vector::{inner, modulus_and_norm, ModuleVector, GRAM_TOL};
