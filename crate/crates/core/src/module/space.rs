use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraShape;
use crate::error::{Error, Result};

/// How the algebra acts on the module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    /// Right action `x·a` only.
    #[default]
    RightOnly,
    /// Right action plus the coordinatewise left action `a·x`, which satisfies
    /// `⟨x, a·y⟩ = a⟨x, y⟩`. Only available over commutative algebras.
    TwoSided,
}

/// The standard module `A^rank` over a block-diagonal algebra `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct ModuleSpace {
    algebra: AlgebraShape,
    rank: usize,
    action: Action,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    algebra: AlgebraShape,
    rank: usize,
    #[serde(default)]
    action: Action,
}

impl TryFrom<SpaceRepr> for ModuleSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        ModuleSpace::new(r.algebra, r.rank, r.action)
    }
}

impl From<ModuleSpace> for SpaceRepr {
    fn from(s: ModuleSpace) -> Self {
        SpaceRepr {
            algebra: s.algebra,
            rank: s.rank,
            action: s.action,
        }
    }
}

impl ModuleSpace {
    pub fn new(algebra: AlgebraShape, rank: usize, action: Action) -> Result<Self> {
        if rank == 0 {
            return Err(Error::input("module rank must be positive"));
        }
        if action == Action::TwoSided && !algebra.is_commutative() {
            return Err(Error::input(format!(
                "a two-sided module needs a commutative algebra, got {algebra}"
            )));
        }
        Ok(ModuleSpace {
            algebra,
            rank,
            action,
        })
    }

    pub fn right(algebra: AlgebraShape, rank: usize) -> Result<Self> {
        Self::new(algebra, rank, Action::RightOnly)
    }

    /// Two-sided module over `ℂ^dim`.
    pub fn commutative(dim: usize, rank: usize) -> Result<Self> {
        Self::new(AlgebraShape::diagonal(dim)?, rank, Action::TwoSided)
    }

    /// The Hilbert space `ℂ^rank` seen as a module over `A = ℂ`.
    pub fn hilbert(rank: usize) -> Result<Self> {
        Self::new(AlgebraShape::scalar(), rank, Action::TwoSided)
    }

    pub fn algebra(&self) -> &AlgebraShape {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn is_two_sided(&self) -> bool {
        self.action == Action::TwoSided
    }

    pub fn with_action(&self, action: Action) -> Result<Self> {
        Self::new(self.algebra.clone(), self.rank, action)
    }
}
