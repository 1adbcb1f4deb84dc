//! Bounded Bunch-Kaufman pivoting for the dense trailing block.
//!
//! Once the remaining matrix is dense there is no sparsity left to preserve, so pivots
//! are chosen for stability alone. The Bunch-Kaufman test is tried from the first
//! nonzero column; when it fails the search moves to the column holding the current
//! largest off-diagonal entry and repeats (rook search) until a 1×1 pivot passes or a
//! 2×2 pivot is formed by two columns that share their largest off-diagonal.
//!
//! Every pivot returned also passes the same `α` threshold tests used in the sparse
//! phase, so `|L_ij| ≤ 1/α` holds across both phases. If the rook candidate fails them
//! (possible for `α` close to 0.5) a full Bunch-Parlett search with diagonal threshold
//! `1 − α` is used, which always satisfies both tests.

use crate::error::{Error, Result};
use crate::factors::BlockDiagonal;
use crate::permutation::Permutation;
use crate::pivot::{one_by_one_is_stable, two_by_two_is_stable, PivotChoice, StabilityConfig};

/// `(1 + √17) / 8`, the classical Bunch-Kaufman growth-balancing constant.
pub const BUNCH_KAUFMAN_CONSTANT: f64 = 0.640_388_203_202_207_6;

/// Dense symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; dim * dim],
        }
    }

    /// Wraps a row-major array; it must be exactly symmetric.
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: values.len(),
            });
        }
        for i in 0..dim {
            for j in 0..i {
                let (upper, lower) = (values[j * dim + i], values[i * dim + j]);
                if upper != lower {
                    return Err(Error::Asymmetric {
                        row: j,
                        col: i,
                        upper,
                        lower,
                    });
                }
            }
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.dim + j] = v;
        self.values[j * self.dim + i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `(row, l1, l2)`: the multipliers of one row against the pivot columns; `l2` is unused
/// for a 1×1 pivot.
type Multipliers = (usize, f64, f64);

/// Dense `PᵀMP = LBLᵀ`. `l` is row-major, unit lower triangular, in permuted order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLdlt {
    pub perm: Permutation,
    pub l: Vec<f64>,
    pub blocks: BlockDiagonal,
}

/// Bounded Bunch-Kaufman with a configurable growth constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundedBunchKaufman {
    stability: StabilityConfig,
    growth: f64,
}

impl BoundedBunchKaufman {
    pub fn new(stability: StabilityConfig) -> Self {
        Self {
            stability,
            growth: BUNCH_KAUFMAN_CONSTANT,
        }
    }

    /// Overrides the growth constant, which must lie in `(0, 1)`.
    pub fn with_growth(stability: StabilityConfig, growth: f64) -> Result<Self> {
        if !(growth > 0.0 && growth < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Bunch-Kaufman constant {growth} is outside (0, 1)"
            )));
        }
        Ok(Self { stability, growth })
    }

    pub fn stability(&self) -> &StabilityConfig {
        &self.stability
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn select(&self, m: &DenseSymMatrix) -> Option<PivotChoice> {
        let active: Vec<usize> = (0..m.dim).collect();
        self.select_among(m, &active)
    }

    pub fn factorize(&self, mut m: DenseSymMatrix) -> Result<DenseLdlt> {
        let dim = m.dim;
        let mut active: Vec<usize> = (0..dim).collect();
        let mut order = Vec::with_capacity(dim);
        let mut steps: Vec<(Vec<usize>, Vec<Multipliers>)> = Vec::new();
        let mut blocks = BlockDiagonal::new();

        while !active.is_empty() {
            let choice = self
                .select_among(&m, &active)
                .ok_or(Error::SingularMatrix {
                    remaining: active.len(),
                })?;
            let cols = choice.columns();
            active.retain(|c| !cols.contains(c));
            let rows = eliminate(&mut m, &choice, &active);
            blocks.push(choice.to_block());
            order.extend_from_slice(&cols);
            steps.push((cols, rows));
        }

        let perm = Permutation::from_order(order)?;
        let pos = perm.forward();
        let mut l = vec![0.0; dim * dim];
        for k in 0..dim {
            l[k * dim + k] = 1.0;
        }
        for (cols, rows) in &steps {
            for &(r, l1, l2) in rows {
                l[pos[r] * dim + pos[cols[0]]] = l1;
                if let Some(&second) = cols.get(1) {
                    l[pos[r] * dim + pos[second]] = l2;
                }
            }
        }
        Ok(DenseLdlt { perm, l, blocks })
    }

    fn select_among(&self, m: &DenseSymMatrix, active: &[usize]) -> Option<PivotChoice> {
        let candidate = self.rook_search(m, active)?;
        if self.passes_threshold(m, active, &candidate) {
            return Some(candidate);
        }
        let fallback = self.bunch_parlett(m, active)?;
        self.passes_threshold(m, active, &fallback)
            .then_some(fallback)
    }

    fn rook_search(&self, m: &DenseSymMatrix, active: &[usize]) -> Option<PivotChoice> {
        let start = active
            .iter()
            .copied()
            .find(|&k| m.get(k, k) != 0.0 || offdiag_max(m, active, k).0 > 0.0)?;
        let (w_start, mut r) = offdiag_max(m, active, start);
        if m.get(start, start).abs() >= self.growth * w_start {
            return Some(one_by_one(m, start));
        }
        let (mut i, mut w_i) = (start, w_start);
        loop {
            let (w_r, s) = offdiag_max(m, active, r);
            if m.get(r, r).abs() >= self.growth * w_r {
                return Some(one_by_one(m, r));
            }
            if w_r == w_i {
                return Some(two_by_two(m, i, r));
            }
            i = r;
            w_i = w_r;
            r = s;
        }
    }

    fn bunch_parlett(&self, m: &DenseSymMatrix, active: &[usize]) -> Option<PivotChoice> {
        let mut off = (0.0, 0, 0);
        let mut diag = (0.0, 0);
        for (p, &i) in active.iter().enumerate() {
            let d = m.get(i, i).abs();
            if d > diag.0 {
                diag = (d, i);
            }
            for &j in &active[p + 1..] {
                let v = m.get(i, j).abs();
                if v > off.0 {
                    off = (v, i, j);
                }
            }
        }
        let threshold = 1.0 - self.stability.alpha();
        if diag.0 > 0.0 && diag.0 >= threshold * off.0 {
            Some(one_by_one(m, diag.1))
        } else if off.0 > 0.0 {
            Some(two_by_two(m, off.1, off.2))
        } else {
            None
        }
    }

    fn passes_threshold(&self, m: &DenseSymMatrix, active: &[usize], choice: &PivotChoice) -> bool {
        match *choice {
            PivotChoice::OneByOne { col, value } => {
                let max = column_max(m, active, col, &[col]);
                one_by_one_is_stable(value, max, &self.stability)
            }
            PivotChoice::TwoByTwo {
                first,
                second,
                block,
            } => {
                let pair = [first, second];
                two_by_two_is_stable(
                    block[0],
                    block[1],
                    block[2],
                    column_max(m, active, first, &pair),
                    column_max(m, active, second, &pair),
                    &self.stability,
                )
            }
        }
    }
}

/// Bounded Bunch-Kaufman selection over the whole matrix with the classical constant.
pub fn bbk_select(m: &DenseSymMatrix, cfg: &StabilityConfig) -> Option<PivotChoice> {
    BoundedBunchKaufman::new(*cfg).select(m)
}

pub fn dense_factorize(m: DenseSymMatrix, cfg: &StabilityConfig) -> Result<DenseLdlt> {
    BoundedBunchKaufman::new(*cfg).factorize(m)
}

fn one_by_one(m: &DenseSymMatrix, col: usize) -> PivotChoice {
    PivotChoice::OneByOne {
        col,
        value: m.get(col, col),
    }
}

fn two_by_two(m: &DenseSymMatrix, first: usize, second: usize) -> PivotChoice {
    PivotChoice::TwoByTwo {
        first,
        second,
        block: [
            m.get(first, first),
            m.get(first, second),
            m.get(second, second),
        ],
    }
}

/// Largest off-diagonal magnitude in column `k` over active rows, with its row (first
/// row on ties).
fn offdiag_max(m: &DenseSymMatrix, active: &[usize], k: usize) -> (f64, usize) {
    let mut best = (0.0, k);
    for &r in active {
        let v = m.get(r, k).abs();
        if r != k && v > best.0 {
            best = (v, r);
        }
    }
    best
}

fn column_max(m: &DenseSymMatrix, active: &[usize], k: usize, exclude: &[usize]) -> f64 {
    active
        .iter()
        .filter(|r| !exclude.contains(r))
        .fold(0.0, |acc, &r| acc.max(m.get(r, k).abs()))
}

/// Eliminates `choice` from `m` over the remaining `active` indices (pivot columns already
/// removed). Returns the `L` multipliers `(row, l1, l2)` for every active row.
fn eliminate(m: &mut DenseSymMatrix, choice: &PivotChoice, active: &[usize]) -> Vec<Multipliers> {
    let rows: Vec<Multipliers> = match *choice {
        PivotChoice::OneByOne { col, value } => active
            .iter()
            .map(|&r| (r, m.get(r, col) / value, 0.0))
            .collect(),
        PivotChoice::TwoByTwo {
            first,
            second,
            block: [a11, a12, a22],
        } => {
            let det = a11 * a22 - a12 * a12;
            let (inv11, inv12, inv22) = (a22 / det, -a12 / det, a11 / det);
            active
                .iter()
                .map(|&r| {
                    let (ci, cj) = (m.get(r, first), m.get(r, second));
                    (r, ci * inv11 + cj * inv12, ci * inv12 + cj * inv22)
                })
                .collect()
        }
    };
    let cols = choice.columns();
    for (p, &(r, l1, l2)) in rows.iter().enumerate() {
        for &(c, _, _) in &rows[p..] {
            let mut update = l1 * m.get(c, cols[0]);
            if let Some(&second) = cols.get(1) {
                update += l2 * m.get(c, second);
            }
            let v = m.get(r, c) - update;
            m.set(r, c, v);
        }
    }
    for &c in &cols {
        for &(r, _, _) in &rows {
            m.set(r, c, 0.0);
        }
    }
    rows.into_iter()
        .map(|(r, l1, l2)| (r, l1, if cols.len() == 2 { l2 } else { 0.0 }))
        .collect()
}
