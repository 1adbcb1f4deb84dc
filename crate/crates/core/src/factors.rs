//! The factors `P`, `L` and `B` of `PᵀAP = LBLᵀ`.

use crate::permutation::Permutation;

/// One diagonal block of `B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PivotBlock {
    Scalar(f64),
    /// Symmetric block `[[b11, b12], [b12, b22]]` with its reciprocal determinant cached
    /// for repeated solves.
    TwoByTwo {
        b11: f64,
        b12: f64,
        b22: f64,
        inv_det: f64,
    },
}

impl PivotBlock {
    pub fn two_by_two(b11: f64, b12: f64, b22: f64) -> Self {
        PivotBlock::TwoByTwo {
            b11,
            b12,
            b22,
            inv_det: 1.0 / (b11 * b22 - b12 * b12),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PivotBlock::Scalar(_) => 1,
            PivotBlock::TwoByTwo { .. } => 2,
        }
    }

    pub fn is_nonsingular(&self) -> bool {
        match *self {
            PivotBlock::Scalar(v) => v != 0.0,
            PivotBlock::TwoByTwo { b11, b12, b22, .. } => b11 * b22 - b12 * b12 != 0.0,
        }
    }
}

/// Block-diagonal `B`: a sequence of 1×1 and 2×2 blocks laid out along the diagonal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockDiagonal {
    blocks: Vec<PivotBlock>,
}

impl BlockDiagonal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, block: PivotBlock) {
        self.blocks.push(block);
    }

    pub fn blocks(&self) -> &[PivotBlock] {
        &self.blocks
    }

    /// Sum of block sizes.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(PivotBlock::size).sum()
    }

    /// Blocks paired with the diagonal position of their first row.
    pub fn with_offsets(&self) -> impl Iterator<Item = (usize, &PivotBlock)> + '_ {
        self.blocks.iter().scan(0usize, |offset, block| {
            let start = *offset;
            *offset += block.size();
            Some((start, block))
        })
    }

    pub fn extend(&mut self, other: BlockDiagonal) {
        self.blocks.extend(other.blocks);
    }

    /// Solves `B y = z` in place.
    pub fn solve_in_place(&self, z: &mut [f64]) {
        for (k, block) in self.with_offsets() {
            match *block {
                PivotBlock::Scalar(v) => z[k] /= v,
                PivotBlock::TwoByTwo {
                    b11,
                    b12,
                    b22,
                    inv_det,
                } => {
                    let (z1, z2) = (z[k], z[k + 1]);
                    z[k] = (b22 * z1 - b12 * z2) * inv_det;
                    z[k + 1] = (b11 * z2 - b12 * z1) * inv_det;
                }
            }
        }
    }
}

/// Unit lower-triangular `L` with the strictly lower part stored by column. The unit
/// diagonal is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitLowerTriangular {
    columns: Vec<Vec<(usize, f64)>>,
}

impl UnitLowerTriangular {
    pub fn identity(n: usize) -> Self {
        Self {
            columns: vec![Vec::new(); n],
        }
    }

    /// Builds from per-column entries. Rows must be strictly greater than the column;
    /// columns are sorted here.
    pub(crate) fn from_columns(mut columns: Vec<Vec<(usize, f64)>>) -> Self {
        for (j, col) in columns.iter_mut().enumerate() {
            col.sort_unstable_by_key(|&(r, _)| r);
            debug_assert!(col.iter().all(|&(r, v)| r > j && v != 0.0));
        }
        Self { columns }
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// Strictly-lower entries of column `j`, sorted by row.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    /// Stored strictly-lower entries.
    pub fn strict_nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Stored entries plus the `n` implicit unit diagonal entries.
    pub fn nnz_with_diagonal(&self) -> usize {
        self.strict_nnz() + self.n()
    }

    pub fn max_abs(&self) -> f64 {
        self.columns
            .iter()
            .flatten()
            .fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    /// Solves `L z = b` in place.
    pub fn forward_solve(&self, z: &mut [f64]) {
        for (k, col) in self.columns.iter().enumerate() {
            let zk = z[k];
            if zk != 0.0 {
                for &(r, l) in col {
                    z[r] -= l * zk;
                }
            }
        }
    }

    /// Solves `Lᵀ z = b` in place.
    pub fn backward_solve(&self, z: &mut [f64]) {
        for (k, col) in self.columns.iter().enumerate().rev() {
            let mut acc = z[k];
            for &(r, l) in col {
                acc -= l * z[r];
            }
            z[k] = acc;
        }
    }

    /// Row-major dense copy including the unit diagonal.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut dense = vec![0.0; n * n];
        for (j, col) in self.columns.iter().enumerate() {
            dense[j * n + j] = 1.0;
            for &(r, v) in col {
                dense[r * n + j] = v;
            }
        }
        dense
    }
}

/// `PᵀAP = LBLᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub(crate) perm: Permutation,
    pub(crate) l: UnitLowerTriangular,
    pub(crate) b: BlockDiagonal,
}

impl Factorization {
    pub fn new(perm: Permutation, l: UnitLowerTriangular, b: BlockDiagonal) -> Self {
        assert_eq!(perm.len(), l.n());
        assert_eq!(perm.len(), b.dim());
        Self { perm, l, b }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn l(&self) -> &UnitLowerTriangular {
        &self.l
    }

    pub fn b(&self) -> &BlockDiagonal {
        &self.b
    }
}
