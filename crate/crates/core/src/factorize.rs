//! Right-looking sparse elimination driver.
//!
//! Each step picks a pivot with [`EliminationState::select_pivot`], records the `L`
//! multipliers `C B⁻¹` for the pivot columns and replaces the remaining matrix by its
//! Schur complement `Z − C B⁻¹ Cᵀ`. Once the remaining matrix is dense (or no sparse
//! pivot passes the threshold tests) the rest is handed to the dense bounded
//! Bunch-Kaufman phase and its factors are spliced onto the end.

use crate::dense::{BoundedBunchKaufman, DenseSymMatrix, BUNCH_KAUFMAN_CONSTANT};
use crate::error::{Error, Result};
use crate::factors::{BlockDiagonal, Factorization, PivotBlock, UnitLowerTriangular};
use crate::matrix::SymmetricSparseMatrix;
use crate::permutation::Permutation;
use crate::pivot::{EliminationState, PivotChoice, StabilityConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorizeOptions {
    pub stability: StabilityConfig,
    /// Switch to the dense phase once the off-diagonal density of the remaining matrix
    /// reaches this fraction. `1.0` means only when it is completely dense.
    pub dense_switch_density: f64,
    /// Switch to the dense phase once at most this many columns remain.
    pub dense_switch_min_dim: usize,
    /// Growth constant of the dense Bunch-Kaufman search.
    pub bunch_kaufman_constant: f64,
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        Self {
            stability: StabilityConfig::default(),
            dense_switch_density: 1.0,
            dense_switch_min_dim: 0,
            bunch_kaufman_constant: BUNCH_KAUFMAN_CONSTANT,
        }
    }
}

impl FactorizeOptions {
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Ok(Self {
            stability: StabilityConfig::new(alpha)?,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dense_switch_density > 0.0 && self.dense_switch_density <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dense switch density {} is outside (0, 1]",
                self.dense_switch_density
            )));
        }
        BoundedBunchKaufman::with_growth(self.stability, self.bunch_kaufman_constant)?;
        Ok(())
    }
}

/// Counters describing one factorization.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FactorizeStats {
    pub n: usize,
    /// Stored strictly-lower entries of `L` plus the `n` unit diagonal entries.
    pub nnz_l: usize,
    /// Pivots chosen in the sparse phase.
    pub num_1x1: usize,
    pub num_2x2: usize,
    /// Pivots chosen in the dense phase.
    pub dense_1x1: usize,
    pub dense_2x2: usize,
    /// Number of columns left when the dense phase took over.
    pub dense_switch_at: Option<usize>,
    pub max_abs_l: f64,
}

impl FactorizeStats {
    pub fn total_1x1(&self) -> usize {
        self.num_1x1 + self.dense_1x1
    }

    pub fn total_2x2(&self) -> usize {
        self.num_2x2 + self.dense_2x2
    }
}

/// What a sparse-phase step looked like, handed to observers before the step is applied.
pub struct StepView<'a> {
    /// State at selection time.
    pub state: &'a EliminationState,
    pub pivot: &'a PivotChoice,
    /// Columns set aside (in the order tried) before `pivot` was found.
    pub rejected: &'a [usize],
}

/// True when the remaining matrix should be handed to the dense phase.
pub fn should_switch_dense(state: &EliminationState, opts: &FactorizeOptions) -> bool {
    let m = state.active().len();
    m <= opts.dense_switch_min_dim
        || (m >= 2 && state.offdiag_density() >= opts.dense_switch_density)
}

pub fn factorize(
    a: &SymmetricSparseMatrix,
    opts: &FactorizeOptions,
) -> Result<(Factorization, FactorizeStats)> {
    factorize_observed(a, opts, |_| {})
}

/// [`factorize`] with a callback invoked for every sparse-phase pivot.
pub fn factorize_observed<F>(
    a: &SymmetricSparseMatrix,
    opts: &FactorizeOptions,
    mut observe: F,
) -> Result<(Factorization, FactorizeStats)>
where
    F: FnMut(&StepView<'_>),
{
    opts.validate()?;
    let n = a.n();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cannot factorize an empty matrix".into(),
        ));
    }

    let mut state = EliminationState::new(a);
    let mut order = Vec::with_capacity(n);
    // L columns keyed by elimination position, rows still in original indices.
    let mut l_columns: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut blocks = BlockDiagonal::new();
    let mut stats = FactorizeStats {
        n,
        ..FactorizeStats::default()
    };
    let mut rejected = Vec::new();

    while !state.active().is_empty() {
        if should_switch_dense(&state, opts) {
            break;
        }
        let Some(pivot) = state.select_pivot_traced(&opts.stability, &mut rejected) else {
            break;
        };
        observe(&StepView {
            state: &state,
            pivot: &pivot,
            rejected: &rejected,
        });

        let neighbors = state.pivot_neighbors(&pivot);
        let multipliers = schur_update(state.remaining_mut(), &pivot, &neighbors);
        state.refresh_after_elimination(&pivot, &neighbors);

        match pivot {
            PivotChoice::OneByOne { col, .. } => {
                stats.num_1x1 += 1;
                order.push(col);
                l_columns.push(nonzero(multipliers.iter().map(|&(r, l1, _)| (r, l1))));
            }
            PivotChoice::TwoByTwo { first, second, .. } => {
                stats.num_2x2 += 1;
                order.extend([first, second]);
                l_columns.push(nonzero(multipliers.iter().map(|&(r, l1, _)| (r, l1))));
                l_columns.push(nonzero(multipliers.iter().map(|&(r, _, l2)| (r, l2))));
            }
        }
        blocks.push(pivot.to_block());
    }

    if !state.active().is_empty() {
        let remaining: Vec<usize> = state.active().iter().copied().collect();
        stats.dense_switch_at = Some(remaining.len());
        let dense = densify(state.remaining(), &remaining);
        let bbk = BoundedBunchKaufman::with_growth(opts.stability, opts.bunch_kaufman_constant)?;
        let ldlt = bbk.factorize(dense).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SingularMatrix {
                remaining: remaining.len(),
            },
            other => other,
        })?;

        let m = remaining.len();
        let local_order = ldlt.perm.inverse();
        for (k, &local) in local_order.iter().enumerate() {
            order.push(remaining[local]);
            l_columns.push(nonzero(
                ((k + 1)..m).map(|r| (remaining[local_order[r]], ldlt.l[r * m + k])),
            ));
        }
        for block in ldlt.blocks.blocks() {
            match block {
                PivotBlock::Scalar(_) => stats.dense_1x1 += 1,
                PivotBlock::TwoByTwo { .. } => stats.dense_2x2 += 1,
            }
        }
        blocks.extend(ldlt.blocks);
    }

    let perm = Permutation::from_order(order)?;
    let pos = perm.forward();
    let l = UnitLowerTriangular::from_columns(
        l_columns
            .into_iter()
            .map(|col| col.into_iter().map(|(r, v)| (pos[r], v)).collect())
            .collect(),
    );
    stats.nnz_l = l.nnz_with_diagonal();
    stats.max_abs_l = l.max_abs();
    Ok((Factorization::new(perm, l, blocks), stats))
}

fn nonzero(entries: impl Iterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    entries.filter(|&(_, v)| v != 0.0).collect()
}

fn densify(m: &SymmetricSparseMatrix, cols: &[usize]) -> DenseSymMatrix {
    let mut local = vec![usize::MAX; m.n()];
    for (k, &c) in cols.iter().enumerate() {
        local[c] = k;
    }
    let mut dense = DenseSymMatrix::zeros(cols.len());
    for (k, &c) in cols.iter().enumerate() {
        for &(r, v) in m.column(c) {
            dense.set(local[r], k, v);
        }
    }
    dense
}

/// Replaces `remaining` by its Schur complement with respect to `pivot`, removing the
/// pivot columns. `neighbors` are the columns adjacent to the pivot. Returns the `L`
/// multipliers `(row, l1, l2)` for every neighbor (`l2` is zero for a 1×1 pivot).
///
/// The update of entry `(r, c)` is always computed from the multiplier of the smaller
/// index and the pivot-column entry of the larger, so both triangles receive bitwise
/// identical values. Exact zeros are dropped.
pub(crate) fn schur_update(
    remaining: &mut SymmetricSparseMatrix,
    pivot: &PivotChoice,
    neighbors: &[usize],
) -> Vec<(usize, f64, f64)> {
    let n = remaining.n();
    let cols = pivot.columns();
    let pivot_cols: Vec<Vec<(usize, f64)>> =
        cols.iter().map(|&c| remaining.take_column(c)).collect();

    // Dense scatter of the pivot columns over the neighbor rows.
    let mut a_first = vec![0.0; n];
    let mut a_second = vec![0.0; n];
    for &(r, v) in &pivot_cols[0] {
        a_first[r] = v;
    }
    if let Some(col) = pivot_cols.get(1) {
        for &(r, v) in col {
            a_second[r] = v;
        }
    }

    let multipliers: Vec<(usize, f64, f64)> = match *pivot {
        PivotChoice::OneByOne { value, .. } => neighbors
            .iter()
            .map(|&r| (r, a_first[r] / value, 0.0))
            .collect(),
        PivotChoice::TwoByTwo {
            block: [a11, a12, a22],
            ..
        } => {
            let det = a11 * a22 - a12 * a12;
            let (inv11, inv12, inv22) = (a22 / det, -a12 / det, a11 / det);
            neighbors
                .iter()
                .map(|&r| {
                    let (ci, cj) = (a_first[r], a_second[r]);
                    (r, ci * inv11 + cj * inv12, ci * inv12 + cj * inv22)
                })
                .collect()
        }
    };

    let two = cols.len() == 2;
    for &(c, lc1, lc2) in &multipliers {
        let old = remaining.take_column(c);
        let mut merged = Vec::with_capacity(old.len() + multipliers.len());
        let mut old_iter = old
            .into_iter()
            .filter(|(r, _)| !cols.contains(r))
            .peekable();
        for &(r, lr1, lr2) in &multipliers {
            // Canonical form: multiplier of min(r, c), pivot entries of max(r, c).
            let update = if r <= c {
                let mut u = lr1 * a_first[c];
                if two {
                    u += lr2 * a_second[c];
                }
                u
            } else {
                let mut u = lc1 * a_first[r];
                if two {
                    u += lc2 * a_second[r];
                }
                u
            };
            while let Some(&(row, v)) = old_iter.peek() {
                if row >= r {
                    break;
                }
                merged.push((row, v));
                old_iter.next();
            }
            let base = match old_iter.peek() {
                Some(&(row, v)) if row == r => {
                    old_iter.next();
                    v
                }
                _ => 0.0,
            };
            let value = base - update;
            if value != 0.0 {
                merged.push((r, value));
            }
        }
        merged.extend(old_iter);
        remaining.replace_column(c, merged);
    }
    debug_assert!(remaining.check_invariants());
    multipliers
}
