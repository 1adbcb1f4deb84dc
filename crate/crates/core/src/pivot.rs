//! Minimum-degree pivot selection with threshold stability tests.
//!
//! At each step the active column of smallest off-diagonal count is tried first as a
//! 1×1 pivot. If its diagonal is too small relative to the rest of the column, every
//! neighbour `z` of that column is a 2×2 candidate; candidates are tried in order of the
//! size of the union of the two column patterns. If none is stable the column is set
//! aside for this step and the next minimum-degree column is tried.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::factors::PivotBlock;
use crate::matrix::SymmetricSparseMatrix;

/// Threshold `α` bounding the entries of `L` by `1/α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityConfig {
    alpha: f64,
}

impl StabilityConfig {
    pub const DEFAULT_ALPHA: f64 = 0.01;

    /// `alpha` must lie in `(0, 0.5]`.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 0.5 {
            Ok(Self { alpha })
        } else {
            Err(Error::InvalidParameter(format!(
                "stability threshold alpha = {alpha} is outside (0, 0.5]"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The bound `1/α` on `|L_ij|`.
    pub fn growth_bound(&self) -> f64 {
        1.0 / self.alpha
    }
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

/// `|a_ii| ≥ α · max_{r≠i} |a_ri|`, with `a_ii ≠ 0` additionally required.
pub fn one_by_one_is_stable(diag: f64, column_max: f64, cfg: &StabilityConfig) -> bool {
    diag != 0.0 && diag.abs() >= cfg.alpha * column_max
}

/// `|B⁻¹| · (max_i, max_j)ᵀ ≤ (1/α, 1/α)ᵀ` for `B = [[a_ii, a_ij], [a_ij, a_jj]]`, where
/// the maxima are taken over rows outside the pair. Numerically singular blocks fail.
pub fn two_by_two_is_stable(
    a_ii: f64,
    a_ij: f64,
    a_jj: f64,
    max_i: f64,
    max_j: f64,
    cfg: &StabilityConfig,
) -> bool {
    let det = a_ii * a_jj - a_ij * a_ij;
    let scale = (a_ii * a_jj).abs() + a_ij * a_ij;
    if det == 0.0 || det.abs() <= f64::EPSILON * scale {
        return false;
    }
    let inv11 = (a_jj / det).abs();
    let inv12 = (a_ij / det).abs();
    let inv22 = (a_ii / det).abs();
    let bound = cfg.growth_bound();
    inv11 * max_i + inv12 * max_j <= bound && inv12 * max_i + inv22 * max_j <= bound
}

/// A pivot chosen for the next elimination step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PivotChoice {
    OneByOne {
        col: usize,
        value: f64,
    },
    /// `block` holds `[a_ii, a_ij, a_jj]` for `first = i`, `second = j`.
    TwoByTwo {
        first: usize,
        second: usize,
        block: [f64; 3],
    },
}

impl PivotChoice {
    pub fn size(&self) -> usize {
        match self {
            PivotChoice::OneByOne { .. } => 1,
            PivotChoice::TwoByTwo { .. } => 2,
        }
    }

    /// Pivot columns in elimination order.
    pub fn columns(&self) -> Vec<usize> {
        match *self {
            PivotChoice::OneByOne { col, .. } => vec![col],
            PivotChoice::TwoByTwo { first, second, .. } => vec![first, second],
        }
    }

    pub fn to_block(&self) -> PivotBlock {
        match *self {
            PivotChoice::OneByOne { value, .. } => PivotBlock::Scalar(value),
            PivotChoice::TwoByTwo { block, .. } => {
                PivotBlock::two_by_two(block[0], block[1], block[2])
            }
        }
    }
}

/// The live remaining matrix `A⁽ᵏ⁾`, the active column set and cached degrees.
///
/// `remaining` keeps original indices; eliminated columns are empty and no active column
/// stores an entry in an eliminated row.
#[derive(Clone, Debug)]
pub struct EliminationState {
    remaining: SymmetricSparseMatrix,
    active: BTreeSet<usize>,
    degree: Vec<usize>,
}

impl EliminationState {
    pub fn new(a: &SymmetricSparseMatrix) -> Self {
        let degree = (0..a.n()).map(|j| a.offdiag_count(j)).collect();
        Self {
            remaining: a.clone(),
            active: (0..a.n()).collect(),
            degree,
        }
    }

    pub fn remaining(&self) -> &SymmetricSparseMatrix {
        &self.remaining
    }

    pub(crate) fn remaining_mut(&mut self) -> &mut SymmetricSparseMatrix {
        &mut self.remaining
    }

    pub fn active(&self) -> &BTreeSet<usize> {
        &self.active
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.active.contains(&j)
    }

    pub fn degree(&self, j: usize) -> usize {
        self.degree[j]
    }

    pub fn eliminated(&self) -> usize {
        self.remaining.n() - self.active.len()
    }

    /// Fraction of off-diagonal positions of the active submatrix that are nonzero.
    /// Zero when fewer than two columns remain.
    pub fn offdiag_density(&self) -> f64 {
        let m = self.active.len();
        if m < 2 {
            return 0.0;
        }
        let total: usize = self.active.iter().map(|&j| self.degree[j]).sum();
        total as f64 / (m * (m - 1)) as f64
    }

    /// Whether every cached degree matches a fresh count.
    pub fn degrees_consistent(&self) -> bool {
        self.active
            .iter()
            .all(|&j| self.degree[j] == self.remaining.offdiag_count(j))
    }

    pub fn accept_1x1(&self, i: usize, cfg: &StabilityConfig) -> bool {
        let diag = self.remaining.diagonal(i);
        let column_max = self.remaining.column_max_excluding(i, &[i]);
        one_by_one_is_stable(diag, column_max, cfg)
    }

    /// `Z_i`: active columns `z ≠ i` with `a_iz ≠ 0`, ascending.
    pub fn candidate_set(&self, i: usize) -> Vec<usize> {
        self.remaining
            .column(i)
            .iter()
            .map(|&(r, _)| r)
            .filter(|&r| r != i)
            .collect()
    }

    /// Number of rows outside `{i, z}` where column `i` or column `z` is nonzero.
    pub fn pair_degree(&self, i: usize, z: usize) -> usize {
        let a = self.remaining.column(i);
        let b = self.remaining.column(z);
        let (mut p, mut q, mut count) = (0, 0, 0);
        while p < a.len() || q < b.len() {
            let row = match (a.get(p), b.get(q)) {
                (Some(&(ra, _)), Some(&(rb, _))) => {
                    if ra <= rb {
                        p += 1;
                    }
                    if rb <= ra {
                        q += 1;
                    }
                    ra.min(rb)
                }
                (Some(&(ra, _)), None) => {
                    p += 1;
                    ra
                }
                (None, Some(&(rb, _))) => {
                    q += 1;
                    rb
                }
                (None, None) => unreachable!(),
            };
            if row != i && row != z {
                count += 1;
            }
        }
        count
    }

    pub fn accept_2x2(&self, i: usize, j: usize, cfg: &StabilityConfig) -> bool {
        let m = &self.remaining;
        let pair = [i, j];
        two_by_two_is_stable(
            m.diagonal(i),
            m.get(i, j),
            m.diagonal(j),
            m.column_max_excluding(i, &pair),
            m.column_max_excluding(j, &pair),
            cfg,
        )
    }

    pub fn select_pivot(&self, cfg: &StabilityConfig) -> Option<PivotChoice> {
        self.select_pivot_traced(cfg, &mut Vec::new())
    }

    /// Like [`select_pivot`](Self::select_pivot), additionally recording in `rejected` the
    /// columns that were set aside (in the order they were tried) before the returned
    /// pivot was found.
    pub fn select_pivot_traced(
        &self,
        cfg: &StabilityConfig,
        rejected: &mut Vec<usize>,
    ) -> Option<PivotChoice> {
        rejected.clear();
        let first = self
            .active
            .iter()
            .copied()
            .min_by_key(|&j| (self.degree[j], j))?;
        if let Some(choice) = self.try_column(first, cfg) {
            return Some(choice);
        }
        rejected.push(first);

        let mut order: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&j| j != first)
            .collect();
        order.sort_unstable_by_key(|&j| (self.degree[j], j));
        for i in order {
            if let Some(choice) = self.try_column(i, cfg) {
                return Some(choice);
            }
            rejected.push(i);
        }
        None
    }

    fn try_column(&self, i: usize, cfg: &StabilityConfig) -> Option<PivotChoice> {
        if self.accept_1x1(i, cfg) {
            return Some(PivotChoice::OneByOne {
                col: i,
                value: self.remaining.diagonal(i),
            });
        }
        let mut candidates: Vec<(usize, usize)> = self
            .candidate_set(i)
            .into_iter()
            .map(|z| (self.pair_degree(i, z), z))
            .collect();
        candidates.sort_unstable();
        candidates
            .into_iter()
            .find(|&(_, j)| self.accept_2x2(i, j, cfg))
            .map(|(_, j)| PivotChoice::TwoByTwo {
                first: i,
                second: j,
                block: [
                    self.remaining.diagonal(i),
                    self.remaining.get(i, j),
                    self.remaining.diagonal(j),
                ],
            })
    }

    /// Active columns adjacent to the pivot columns, ascending.
    pub fn pivot_neighbors(&self, pivot: &PivotChoice) -> Vec<usize> {
        let cols = pivot.columns();
        let mut rows: Vec<usize> = cols
            .iter()
            .flat_map(|&c| self.remaining.column(c).iter().map(|&(r, _)| r))
            .filter(|r| !cols.contains(r))
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// Installs the Schur complement produced by eliminating `pivot`, deactivates the pivot
    /// columns and recounts degrees of the columns adjacent to the pivot.
    pub fn update_after_elimination(
        &mut self,
        pivot: &PivotChoice,
        new_remaining: SymmetricSparseMatrix,
    ) {
        let neighbors = self.pivot_neighbors(pivot);
        self.remaining = new_remaining;
        self.refresh_after_elimination(pivot, &neighbors);
    }

    pub(crate) fn refresh_after_elimination(&mut self, pivot: &PivotChoice, neighbors: &[usize]) {
        for c in pivot.columns() {
            self.active.remove(&c);
            self.degree[c] = 0;
        }
        for &j in neighbors {
            self.degree[j] = self.remaining.offdiag_count(j);
        }
        debug_assert!(self.degrees_consistent());
    }
}
