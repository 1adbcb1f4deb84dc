//! Random sparse symmetric test instances.
//!
//! The pattern is drawn uniformly: a number of diagonal positions and a number of
//! off-diagonal symmetric pairs are sampled without replacement so that the stored
//! entry count (both triangles) matches `density · n²` as closely as the pair structure
//! allows. Values are uniform in `value_range`; no definiteness shift is applied, so the
//! matrices are indefinite with high probability.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::SymmetricSparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    /// Target fraction of nonzeros in the full `n × n` matrix, diagonal included.
    pub density: f64,
    pub seed: u64,
    pub value_range: (f64, f64),
}

impl GenSpec {
    pub fn new(n: usize, density: f64, seed: u64) -> Self {
        Self {
            n,
            density,
            seed,
            value_range: (-1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "density {} is outside (0, 1]",
                self.density
            )));
        }
        let (lo, hi) = self.value_range;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "value range [{lo}, {hi}] is empty or not finite"
            )));
        }
        Ok(())
    }

    /// `(diagonal entries, off-diagonal pairs)` realising the target count.
    pub fn pattern_counts(&self) -> (usize, usize) {
        let n = self.n;
        let target = (self.density * (n * n) as f64).round() as usize;
        let diagonal = ((self.density * n as f64).round() as usize).min(n);
        let max_pairs = n * (n - 1) / 2;
        let pairs =
            ((target.saturating_sub(diagonal) as f64 / 2.0).round() as usize).min(max_pairs);
        (diagonal, pairs)
    }
}

pub fn generate(spec: &GenSpec) -> Result<SymmetricSparseMatrix> {
    spec.validate()?;
    let n = spec.n;
    let (diagonal, pairs) = spec.pattern_counts();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut diag_rows = index::sample(&mut rng, n, diagonal).into_vec();
    diag_rows.sort_unstable();
    let mut pair_ids = index::sample(&mut rng, n * (n - 1) / 2, pairs).into_vec();
    pair_ids.sort_unstable();

    let (lo, hi) = spec.value_range;
    let mut value = move || loop {
        let v: f64 = rng.random_range(lo..=hi);
        if v != 0.0 {
            break v;
        }
    };

    let mut triplets = Vec::with_capacity(diagonal + pairs);
    for i in diag_rows {
        triplets.push((i, i, value()));
    }
    for id in pair_ids {
        let (i, j) = decode_pair(id);
        triplets.push((i, j, value()));
    }
    SymmetricSparseMatrix::from_triplets(n, triplets)
}

/// Maps `k ∈ [0, n(n−1)/2)` to the strictly-lower position `(i, j)` with
/// `k = i(i−1)/2 + j`.
fn decode_pair(k: usize) -> (usize, usize) {
    let mut i = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as usize;
    while i * (i - 1) / 2 > k {
        i -= 1;
    }
    while (i + 1) * i / 2 <= k {
        i += 1;
    }
    (i, k - i * (i - 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_decoding_enumerates_lower_triangle() {
        let n = 40;
        let decoded: Vec<(usize, usize)> = (0..n * (n - 1) / 2).map(decode_pair).collect();
        let expected: Vec<(usize, usize)> =
            (1..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        assert_eq!(decoded, expected);
    }

    #[test]
    fn full_density_is_dense() {
        let m = generate(&GenSpec::new(10, 1.0, 7)).unwrap();
        assert_eq!(m.nnz(), 100);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&GenSpec::new(100, 0.3, 11)).unwrap();
        let b = generate(&GenSpec::new(100, 0.3, 11)).unwrap();
        let c = generate(&GenSpec::new(100, 0.3, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn achieved_density_close_to_target() {
        for &(n, density) in &[(100, 0.05), (100, 0.3), (37, 0.11), (300, 0.2)] {
            let m = generate(&GenSpec::new(n, density, 3)).unwrap();
            let achieved = m.nnz() as f64 / (n * n) as f64;
            assert!(
                (achieved - density).abs() <= 0.005,
                "n={n} d={density} got {achieved}"
            );
            assert!(m.check_invariants());
        }
    }

    #[test]
    fn values_within_range() {
        let spec = GenSpec {
            value_range: (2.0, 3.0),
            ..GenSpec::new(20, 0.5, 1)
        };
        let m = generate(&spec).unwrap();
        assert!(m.lower_triplets().all(|(_, _, v)| (2.0..=3.0).contains(&v)));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&GenSpec::new(0, 0.5, 1)).is_err());
        assert!(generate(&GenSpec::new(5, 0.0, 1)).is_err());
        assert!(generate(&GenSpec::new(5, 1.5, 1)).is_err());
    }
}
