use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factors::Factorization;

/// Solves `A x = b` from `PᵀAP = LBLᵀ`: `L z = Pᵀb`, `B ẑ = z`, `Lᵀ z̄ = ẑ`, `x = P z̄`.
pub fn solve(f: &Factorization, b: &[f64]) -> Result<Vec<f64>> {
    let n = f.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let order = f.perm().inverse();
    let mut z: Vec<f64> = order.iter().map(|&i| b[i]).collect();
    f.l().forward_solve(&mut z);
    f.b().solve_in_place(&mut z);
    f.l().backward_solve(&mut z);
    let mut x = vec![0.0; n];
    for (k, &i) in order.iter().enumerate() {
        x[i] = z[k];
    }
    Ok(x)
}

/// Solves for several right-hand sides in parallel. Results are in input order and
/// identical to calling [`solve`] on each.
pub fn solve_many(f: &Factorization, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    rhs.par_iter().map(|b| solve(f, b)).collect()
}
