use crate::error::{Error, Result};

/// A permutation of `0..n` stored in both directions.
///
/// `forward[original] == position` and `inverse[position] == original`. Applied to a
/// matrix this is the `P` in `PᵀAP`: entry `(i, j)` of the permuted matrix is entry
/// `(inverse[i], inverse[j])` of the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            forward: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    /// Builds a permutation from the elimination order: `order[k]` is the original index
    /// placed at position `k`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let forward = invert(&order)?;
        Ok(Self {
            forward,
            inverse: order,
        })
    }

    /// Builds a permutation from the original → position map.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let inverse = invert(&forward)?;
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Original index → permuted position.
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// Permuted position → original index.
    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    /// The inverse permutation `P⁻¹ = Pᵀ`.
    pub fn inverted(&self) -> Self {
        Self {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &p)| i == p)
    }
}

fn invert(map: &[usize]) -> Result<Vec<usize>> {
    let n = map.len();
    let mut inv = vec![usize::MAX; n];
    for (i, &p) in map.iter().enumerate() {
        if p >= n {
            return Err(Error::InvalidParameter(format!(
                "permutation entry {p} out of range for length {n}"
            )));
        }
        if inv[p] != usize::MAX {
            return Err(Error::InvalidParameter(format!(
                "permutation maps two indices to {p}"
            )));
        }
        inv[p] = i;
    }
    Ok(inv)
}
