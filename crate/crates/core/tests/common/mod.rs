#![allow(dead_code)]

use sparse_ldlt::{Factorization, PivotBlock, SymmetricSparseMatrix};

/// Dense `B` assembled from its blocks.
pub fn dense_blocks(f: &Factorization) -> Vec<f64> {
    let n = f.n();
    let mut b = vec![0.0; n * n];
    for (k, block) in f.b().with_offsets() {
        match *block {
            PivotBlock::Scalar(d) => b[k * n + k] = d,
            PivotBlock::TwoByTwo { b11, b12, b22, .. } => {
                b[k * n + k] = b11;
                b[k * n + k + 1] = b12;
                b[(k + 1) * n + k] = b12;
                b[(k + 1) * n + k + 1] = b22;
            }
        }
    }
    b
}

/// `‖PᵀAP − LBLᵀ‖_F` by plain dense triple products.
pub fn dense_residual(a: &SymmetricSparseMatrix, f: &Factorization) -> f64 {
    let n = a.n();
    let ad = a.to_dense();
    let l = f.l().to_dense();
    let b = dense_blocks(f);
    let order = f.perm().inverse();

    let mut lb = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            lb[i * n + j] = (0..n).map(|k| l[i * n + k] * b[k * n + j]).sum();
        }
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lblt: f64 = (0..n).map(|k| lb[i * n + k] * l[j * n + k]).sum();
            let d = ad[order[i] * n + order[j]] - lblt;
            sum += d * d;
        }
    }
    sum.sqrt()
}

/// Off-diagonal nonzero count of column `j` among `active`, read straight from the matrix.
pub fn recount_degree(m: &SymmetricSparseMatrix, active: &[usize], j: usize) -> usize {
    active
        .iter()
        .filter(|&&r| r != j && m.get(r, j) != 0.0)
        .count()
}

/// Rows outside `{i, z}` where column `i` or column `z` is nonzero.
pub fn brute_pair_degree(m: &SymmetricSparseMatrix, i: usize, z: usize) -> usize {
    (0..m.n())
        .filter(|&r| r != i && r != z && (m.get(r, i) != 0.0 || m.get(r, z) != 0.0))
        .count()
}
