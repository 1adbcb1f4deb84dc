//! Symmetric sparse storage.
//!
//! Both triangles are stored so that a whole column (and therefore a whole row) can be
//! scanned without a transpose. Every column is a list of `(row, value)` pairs with
//! strictly increasing rows; exact zeros are never stored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// A symmetric `n × n` matrix with full (two-triangle) column storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSparseMatrix {
    n: usize,
    columns: Vec<Vec<(usize, f64)>>,
    nnz: usize,
}

impl SymmetricSparseMatrix {
    /// The `n × n` zero matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            columns: vec![Vec::new(); n],
            nnz: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            columns: (0..n).map(|j| vec![(j, 1.0)]).collect(),
            nnz: n,
        }
    }

    /// Assembles a symmetric matrix from `(row, col, value)` triplets.
    ///
    /// Triplets sharing the same ordered key are summed. When only one of `(i, j)` and
    /// `(j, i)` is given the mirror is created; when both are given their sums must be
    /// exactly equal. Entries that end up as exactly `0.0` are dropped.
    pub fn from_triplets<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut grouped: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for (row, col, value) in entries {
            if row >= n || col >= n {
                return Err(Error::IndexOutOfRange { row, col, n });
            }
            grouped.entry((row, col)).or_default().push(value);
        }

        // Summation order is fixed by sorting, so the result does not depend on the
        // order the triplets arrived in.
        let summed: BTreeMap<(usize, usize), f64> = grouped
            .into_iter()
            .map(|(key, mut values)| {
                values.sort_by(f64::total_cmp);
                (key, values.into_iter().sum())
            })
            .collect();

        let mut columns = vec![Vec::new(); n];
        for (&(row, col), &value) in &summed {
            if row < col {
                if let Some(&mirror) = summed.get(&(col, row)) {
                    if mirror != value {
                        return Err(Error::Asymmetric {
                            row,
                            col,
                            upper: value,
                            lower: mirror,
                        });
                    }
                }
            } else if row > col && summed.contains_key(&(col, row)) {
                // Already handled (and validated) from the upper side.
                continue;
            }
            if value == 0.0 {
                continue;
            }
            columns[col].push((row, value));
            if row != col {
                columns[row].push((col, value));
            }
        }
        for column in &mut columns {
            column.sort_unstable_by_key(|&(r, _)| r);
        }
        let nnz = columns.iter().map(Vec::len).sum();
        Ok(Self { n, columns, nnz })
    }

    /// Builds a matrix from a row-major dense array, reading only the lower triangle.
    pub fn from_dense_lower(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        let triplets = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j, values[i * n + j])));
        Self::from_triplets(n, triplets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries, counting both triangles.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// The sorted `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let col = &self.columns[j];
        match col.binary_search_by_key(&i, |&(r, _)| r) {
            Ok(pos) => col[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self, j: usize) -> f64 {
        self.get(j, j)
    }

    /// Number of stored off-diagonal entries in column `j`.
    pub fn offdiag_count(&self, j: usize) -> usize {
        let col = &self.columns[j];
        let has_diag = col.binary_search_by_key(&j, |&(r, _)| r).is_ok();
        col.len() - usize::from(has_diag)
    }

    /// Largest `|a_rj|` over stored rows `r` not in `exclude`.
    pub fn column_max_excluding(&self, j: usize, exclude: &[usize]) -> f64 {
        self.columns[j]
            .iter()
            .filter(|(r, _)| !exclude.contains(r))
            .fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    /// Returns `PᵀAP`: entry `(i, j)` of the result is `self(inverse[i], inverse[j])`.
    pub fn apply_permutation(&self, p: &Permutation) -> Result<Self> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let forward = p.forward();
        let columns = p
            .inverse()
            .iter()
            .map(|&old| {
                let mut col: Vec<(usize, f64)> = self.columns[old]
                    .iter()
                    .map(|&(r, v)| (forward[r], v))
                    .collect();
                col.sort_unstable_by_key(|&(r, _)| r);
                col
            })
            .collect();
        Ok(Self {
            n: self.n,
            columns,
            nnz: self.nnz,
        })
    }

    /// Entries of the lower triangle (row ≥ col), column by column.
    pub fn lower_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(j, col)| {
            col.iter()
                .filter(move |&&(r, _)| r >= j)
                .map(move |&(r, v)| (r, j, v))
        })
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.n * self.n];
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                dense[r * self.n + j] = v;
            }
        }
        dense
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.columns
            .iter()
            .flatten()
            .map(|&(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        for (j, col) in self.columns.iter().enumerate() {
            let xj = x[j];
            for &(r, v) in col {
                y[r] += v * xj;
            }
        }
        Ok(y)
    }

    /// Checks every structural invariant; used by tests and debug assertions.
    pub fn check_invariants(&self) -> bool {
        let sorted = self.columns.iter().all(|col| {
            col.windows(2).all(|w| w[0].0 < w[1].0)
                && col.iter().all(|&(r, v)| r < self.n && v != 0.0)
        });
        let symmetric = self.columns.iter().enumerate().all(|(j, col)| {
            col.iter()
                .all(|&(r, v)| self.get(j, r).to_bits() == v.to_bits())
        });
        let counted = self.columns.iter().map(Vec::len).sum::<usize>() == self.nnz;
        sorted && symmetric && counted
    }

    pub(crate) fn take_column(&mut self, j: usize) -> Vec<(usize, f64)> {
        let col = std::mem::take(&mut self.columns[j]);
        self.nnz -= col.len();
        col
    }

    pub(crate) fn replace_column(&mut self, j: usize, col: Vec<(usize, f64)>) {
        self.nnz = self.nnz - self.columns[j].len() + col.len();
        self.columns[j] = col;
    }
}
