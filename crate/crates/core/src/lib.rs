//! Sparse symmetric indefinite `PᵀAP = LBLᵀ` factorization.
//!
//! Pivots are chosen during the numeric factorization: the minimum-degree column is
//! tried as a 1×1 pivot and, failing the threshold test, paired with one of its
//! neighbours as a 2×2 pivot. The threshold `α` bounds every entry of `L` by `1/α`.
//! When the remaining matrix becomes dense, a bounded Bunch-Kaufman search finishes
//! the factorization.
//!
//! ```
//! use sparse_ldlt::{factorize, solve, FactorizeOptions, SymmetricSparseMatrix};
//!
//! let a = SymmetricSparseMatrix::from_triplets(3, [(1, 0, 2.0), (2, 2, -1.0), (2, 1, 1.0)]).unwrap();
//! let (f, stats) = factorize(&a, &FactorizeOptions::default()).unwrap();
//! assert!(stats.max_abs_l <= 100.0);
//! let x = solve(&f, &[2.0, 3.0, 0.0]).unwrap();
//! let ax = a.mul_vec(&x).unwrap();
//! assert!((ax[0] - 2.0).abs() < 1e-12 && (ax[1] - 3.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod dense;
mod error;
pub mod factorize;
mod factors;
pub mod generate;
pub mod io;
mod matrix;
pub mod metrics;
mod permutation;
pub mod pivot;
mod solve;

pub use dense::{bbk_select, dense_factorize, BoundedBunchKaufman, DenseLdlt, DenseSymMatrix};
pub use error::{Error, Result};
pub use factorize::{
    factorize, factorize_observed, should_switch_dense, FactorizeOptions, FactorizeStats, StepView,
};
pub use factors::{BlockDiagonal, Factorization, PivotBlock, UnitLowerTriangular};
pub use generate::{generate, GenSpec};
pub use matrix::SymmetricSparseMatrix;
pub use metrics::{fill_percentage, residual};
pub use permutation::Permutation;
pub use pivot::{EliminationState, PivotChoice, StabilityConfig};
pub use solve::{solve, solve_many};
