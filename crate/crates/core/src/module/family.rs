use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::{ModuleSpace, ModuleVector};
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::json::MatrixRepr;
use crate::random;

/// Tolerance on the orthogonality and normalization of a family.
pub const FAMILY_TOL: f64 = 1e-10;

/// Pairwise orthogonal vectors `e_1, …, e_m` with `‖e_k‖ = 1`.
///
/// A strict family additionally has `⟨e_k, e_k⟩ = 1` (the algebra unit), which
/// is what makes `‖Σ c_k e_k‖² = Σ |c_k|²` exact for scalar coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct OrthoFamily {
    space: ModuleSpace,
    members: Vec<ModuleVector>,
    strict: bool,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    space: ModuleSpace,
    members: Vec<Vec<MatrixRepr>>,
    strict: bool,
}

impl TryFrom<FamilyRepr> for OrthoFamily {
    type Error = Error;

    fn try_from(r: FamilyRepr) -> Result<Self> {
        let members = r
            .members
            .iter()
            .map(|m| ModuleVector::from_reprs(&r.space, m))
            .collect::<Result<Vec<_>>>()?;
        OrthoFamily::new(&r.space, members, r.strict)
    }
}

impl From<OrthoFamily> for FamilyRepr {
    fn from(f: OrthoFamily) -> Self {
        FamilyRepr {
            members: f.members.iter().map(ModuleVector::coord_reprs).collect(),
            space: f.space,
            strict: f.strict,
        }
    }
}

impl OrthoFamily {
    /// Validates orthogonality, unit norms and (when `strict`) unit Gram
    /// elements, all within [`FAMILY_TOL`].
    pub fn new(space: &ModuleSpace, members: Vec<ModuleVector>, strict: bool) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::input("an orthogonal family needs at least one member"));
        }
        if let Some(i) = members.iter().position(|e| e.space() != space) {
            return Err(Error::input(format!("family member {i} lives in a different module")));
        }
        let one = Element::identity(space.algebra());
        for (i, e) in members.iter().enumerate() {
            let norm = e.norm();
            if (norm - 1.0).abs() > FAMILY_TOL {
                return Err(Error::input(format!("family member {i} has norm {norm}, expected 1")));
            }
            if strict {
                let dev = (&e.gram() - &one).op_norm();
                if dev > FAMILY_TOL {
                    return Err(Error::input(format!(
                        "family member {i} has ‖⟨e,e⟩ − 1‖ = {dev:e}, strict family expected"
                    )));
                }
            }
            for (j, f) in members.iter().enumerate().skip(i + 1) {
                let overlap = e.inner(f).op_norm();
                if overlap > FAMILY_TOL {
                    return Err(Error::input(format!(
                        "family members {i} and {j} are not orthogonal (‖⟨e_i,e_j⟩‖ = {overlap:e})"
                    )));
                }
            }
        }
        Ok(OrthoFamily {
            space: space.clone(),
            members,
            strict,
        })
    }

    pub fn space(&self) -> &ModuleSpace {
        &self.space
    }

    pub fn members(&self) -> &[ModuleVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Whether every member has `⟨e_k, e_k⟩ = 1` within [`FAMILY_TOL`],
    /// regardless of how the family was declared.
    pub fn has_unit_moduli(&self) -> bool {
        let one = Element::identity(self.space.algebra());
        self.members
            .iter()
            .all(|e| (&e.gram() - &one).op_norm() <= FAMILY_TOL)
    }

    /// Family of one vector, used where a theorem takes a single `e`.
    pub fn single(e: ModuleVector, strict: bool) -> Result<Self> {
        let space = e.space().clone();
        Self::new(&space, vec![e], strict)
    }
}

/// Random family of `m` members placed in distinct random coordinate slots.
///
/// A strict family uses random block-diagonal unitaries as coordinates, so
/// `⟨e_k, e_k⟩ = u_k*u_k = 1`; otherwise random contractions `a_k` with
/// `‖a_k‖ = 1` are used, giving `|e_k| ≤ 1` and `‖e_k‖ = 1`. The result is a
/// deterministic function of `seed`.
pub fn make_ortho_family(space: &ModuleSpace, m: usize, strict: bool, seed: u64) -> Result<OrthoFamily> {
    if m == 0 || m > space.rank() {
        return Err(Error::input(format!(
            "family size {m} must be between 1 and the module rank {}",
            space.rank()
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..space.rank()).collect();
    slots.shuffle(&mut rng);
    let members = slots[..m]
        .iter()
        .map(|&slot| {
            let coord = if strict {
                random::unitary(&mut rng, space.algebra())
            } else {
                random::contraction(&mut rng, space.algebra())
            };
            ModuleVector::slot(space, slot, coord)
        })
        .collect::<Result<Vec<_>>>()?;
    OrthoFamily::new(space, members, strict)
}
