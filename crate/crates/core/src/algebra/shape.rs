use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block pattern of a finite-dimensional C*-algebra `⊕ᵢ M_{dᵢ}(ℂ)`.
///
/// Elements are stored as `d × d` matrices with `d = Σ dᵢ`; entries outside
/// the diagonal blocks are identically zero. The algebra is commutative
/// exactly when every block is `1 × 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeRepr", into = "ShapeRepr")]
pub struct AlgebraShape {
    blocks: Arc<[usize]>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct ShapeRepr {
    blocks: Vec<usize>,
}

impl TryFrom<ShapeRepr> for AlgebraShape {
    type Error = Error;

    fn try_from(repr: ShapeRepr) -> Result<Self> {
        AlgebraShape::new(repr.blocks)
    }
}

impl From<AlgebraShape> for ShapeRepr {
    fn from(shape: AlgebraShape) -> Self {
        ShapeRepr {
            blocks: shape.blocks.to_vec(),
        }
    }
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::input("algebra shape needs at least one block"));
        }
        if let Some(pos) = blocks.iter().position(|&b| b == 0) {
            return Err(Error::input(format!("block {pos} has dimension 0")));
        }
        let dim = blocks.iter().sum();
        Ok(AlgebraShape {
            blocks: blocks.into(),
            dim,
        })
    }

    /// The complex numbers, `blocks = [1]`.
    pub fn scalar() -> Self {
        Self::new(vec![1]).unwrap()
    }

    /// The full matrix algebra `M_d(ℂ)`.
    pub fn full(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    /// The commutative algebra `ℂ^d` of diagonal matrices.
    pub fn diagonal(dim: usize) -> Result<Self> {
        Self::new(vec![1; dim])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&b| b == 1)
    }

    /// Index ranges of the diagonal blocks, in order.
    pub fn block_ranges(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.blocks.iter().scan(0usize, |start, &len| {
            let r = *start..*start + len;
            *start += len;
            Some(r)
        })
    }

    /// Whether position `(i, j)` lies inside a diagonal block.
    pub fn in_pattern(&self, i: usize, j: usize) -> bool {
        let mut start = 0;
        for &len in self.blocks.iter() {
            let end = start + len;
            if i < end {
                return j >= start && j < end;
            }
            start = end;
        }
        false
    }
}

impl fmt::Debug for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraShape{:?}", &self.blocks[..])
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| format!("M{b}")).collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_blocks() {
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![2, 0]).is_err());
    }

    #[test]
    fn commutative_iff_all_blocks_are_one() {
        assert!(AlgebraShape::diagonal(3).unwrap().is_commutative());
        assert!(AlgebraShape::scalar().is_commutative());
        assert!(!AlgebraShape::new(vec![1, 2]).unwrap().is_commutative());
    }

    #[test]
    fn pattern_and_ranges() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        assert_eq!(s.dim(), 3);
        let ranges: Vec<_> = s.block_ranges().collect();
        assert_eq!(ranges, vec![0..2, 2..3]);
        assert!(s.in_pattern(0, 1));
        assert!(s.in_pattern(2, 2));
        assert!(!s.in_pattern(0, 2));
        assert!(!s.in_pattern(2, 1));
    }

    #[test]
    fn json_shape() {
        let s = AlgebraShape::new(vec![2, 1]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"blocks":[2,1]}"#);
        let back: AlgebraShape = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<AlgebraShape>(r#"{"blocks":[]}"#).is_err());
    }
}
