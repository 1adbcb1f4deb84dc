use crate::error::{Error, Result};
use crate::factors::{Factorization, PivotBlock};
use crate::matrix::SymmetricSparseMatrix;

/// `100 · nnz(L) / n²`, counting the unit diagonal.
pub fn fill_percentage(f: &Factorization) -> f64 {
    let n = f.n() as f64;
    100.0 * f.l().nnz_with_diagonal() as f64 / (n * n)
}

/// Frobenius norm of `PᵀAP − LBLᵀ`, evaluated column by column over the union of the
/// two patterns.
pub fn residual(a: &SymmetricSparseMatrix, f: &Factorization) -> Result<f64> {
    let n = f.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.n(),
        });
    }
    let l = f.l();

    // Columns of L including the unit diagonal.
    let l_full: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|k| {
            std::iter::once((k, 1.0))
                .chain(l.column(k).iter().copied())
                .collect()
        })
        .collect();

    // W = L B, column by column.
    let mut w: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (k, block) in f.b().with_offsets() {
        match *block {
            PivotBlock::Scalar(d) => {
                w[k] = l_full[k].iter().map(|&(r, v)| (r, v * d)).collect();
            }
            PivotBlock::TwoByTwo { b11, b12, b22, .. } => {
                w[k] = combine(&l_full[k], b11, &l_full[k + 1], b12);
                w[k + 1] = combine(&l_full[k], b12, &l_full[k + 1], b22);
            }
        }
    }

    // Rows of L: row j lists (k, L_jk).
    let mut l_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (k, col) in l_full.iter().enumerate() {
        for &(r, v) in col {
            l_rows[r].push((k, v));
        }
    }

    let forward = f.perm().forward();
    let inverse = f.perm().inverse();
    let mut acc = vec![0.0; n];
    let mut touched = vec![false; n];
    let mut rows = Vec::new();
    let mut sum = 0.0;
    for j in 0..n {
        // (L B Lᵀ)[:, j] = Σ_k L[j, k] · W[:, k]
        for &(k, ljk) in &l_rows[j] {
            for &(r, v) in &w[k] {
                if !touched[r] {
                    touched[r] = true;
                    rows.push(r);
                }
                acc[r] += v * ljk;
            }
        }
        for &(r, v) in a.column(inverse[j]) {
            let r = forward[r];
            if !touched[r] {
                touched[r] = true;
                rows.push(r);
            }
            acc[r] -= v;
        }
        for &r in &rows {
            sum += acc[r] * acc[r];
            acc[r] = 0.0;
            touched[r] = false;
        }
        rows.clear();
    }
    Ok(sum.sqrt())
}

fn combine(x: &[(usize, f64)], a: f64, y: &[(usize, f64)], b: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut p, mut q) = (0, 0);
    while p < x.len() || q < y.len() {
        match (x.get(p), y.get(q)) {
            (Some(&(rx, vx)), Some(&(ry, vy))) if rx == ry => {
                out.push((rx, a * vx + b * vy));
                p += 1;
                q += 1;
            }
            (Some(&(rx, vx)), Some(&(ry, _))) if rx < ry => {
                out.push((rx, a * vx));
                p += 1;
            }
            (Some(_), Some(&(ry, vy))) | (None, Some(&(ry, vy))) => {
                out.push((ry, b * vy));
                q += 1;
            }
            (Some(&(rx, vx)), None) => {
                out.push((rx, a * vx));
                p += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}
