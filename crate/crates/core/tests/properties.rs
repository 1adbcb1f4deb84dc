mod common;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use sparse_ldlt::{
    factorize, factorize_observed, fill_percentage, residual, solve, solve_many, FactorizeOptions,
    Permutation, SymmetricSparseMatrix,
};

use common::{brute_pair_degree, dense_residual, recount_degree};

fn nonzero_value() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1.0f64..1.0).prop_filter("nonzero", |v| *v != 0.0),
        prop::sample::select(vec![-2.0, -1.0, 0.5, 1.0, 3.0]),
    ]
}

/// Lower-triangle triplets of a symmetric `n × n` matrix.
fn lower_triplets(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let entry = (0..n, 0..n, nonzero_value()).prop_map(|(i, j, v)| (i.max(j), i.min(j), v));
        (Just(n), prop::collection::vec(entry, 0..=n * (n + 1) / 2))
    })
}

fn matrix(max_n: usize) -> impl Strategy<Value = SymmetricSparseMatrix> {
    lower_triplets(max_n)
        .prop_map(|(n, t)| SymmetricSparseMatrix::from_triplets(n, t).expect("valid triplets"))
}

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_forward(v).unwrap())
}

fn options() -> impl Strategy<Value = FactorizeOptions> {
    (
        prop::sample::select(vec![0.01, 0.1, 0.25, 0.5]),
        0.05f64..=1.0,
        0usize..4,
    )
        .prop_map(|(alpha, density, min_dim)| FactorizeOptions {
            dense_switch_density: density,
            dense_switch_min_dim: min_dim,
            ..FactorizeOptions::with_alpha(alpha).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn permutation_round_trip(p in permutation(40)) {
        prop_assert_eq!(p.inverted().inverted(), p.clone());
        for k in 0..p.len() {
            prop_assert_eq!(p.forward()[p.inverse()[k]], k);
        }
        let order = Permutation::from_order(p.inverse().to_vec()).unwrap();
        prop_assert_eq!(order, p);
    }

    #[test]
    fn permuting_back_restores_matrix(m in matrix(12), seed in any::<u64>()) {
        let n = m.n();
        let mut fwd: Vec<usize> = (0..n).collect();
        fwd.rotate_left((seed as usize) % n);
        let p = Permutation::from_forward(fwd).unwrap();
        let pm = m.apply_permutation(&p).unwrap();
        prop_assert!(pm.check_invariants());
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(pm.get(i, j), m.get(p.inverse()[i], p.inverse()[j]));
            }
        }
        prop_assert_eq!(pm.apply_permutation(&p.inverted()).unwrap(), m);
    }

    #[test]
    fn triplet_order_is_irrelevant((n, t) in lower_triplets(10), rev in any::<bool>()) {
        let a = SymmetricSparseMatrix::from_triplets(n, t.clone()).unwrap();
        let mut shuffled = t;
        if rev {
            shuffled.reverse();
        } else {
            shuffled.sort_by(|x, y| x.2.total_cmp(&y.2));
        }
        // Upper-triangle spelling of the same entries.
        let mirrored = shuffled.into_iter().map(|(i, j, v)| (j, i, v));
        let b = SymmetricSparseMatrix::from_triplets(n, mirrored).unwrap();
        prop_assert!(a.check_invariants());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reconstruction_and_growth_bound(m in matrix(14), opts in options()) {
        if let Ok((f, stats)) = factorize(&m, &opts) {
            let norm = m.frobenius_norm();
            let r = residual(&m, &f).unwrap();
            let oracle = dense_residual(&m, &f);
            prop_assert!((r - oracle).abs() <= 1e-13 * (1.0 + norm), "{r} vs {oracle}");
            prop_assert!(r <= 1e-12 * norm.max(f64::MIN_POSITIVE), "residual {r}, norm {norm}");
            let bound = opts.stability.growth_bound();
            prop_assert!(f.l().max_abs() <= bound);
            prop_assert_eq!(stats.max_abs_l, f.l().max_abs());
            prop_assert_eq!(stats.nnz_l, f.l().nnz_with_diagonal());
            prop_assert_eq!(stats.total_1x1() + 2 * stats.total_2x2(), m.n());
            prop_assert_eq!(f.b().dim(), m.n());
            let n = m.n() as f64;
            let fill = fill_percentage(&f);
            prop_assert!(fill >= 100.0 / n - 1e-12);
            prop_assert!(fill <= 100.0 * (n + 1.0) / (2.0 * n) + 1e-12);
        }
    }

    #[test]
    fn factorization_is_deterministic(m in matrix(14), opts in options()) {
        let first = factorize(&m, &opts);
        let second = factorize(&m, &opts);
        match (first, second) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false, "outcomes differ"),
        }
    }

    #[test]
    fn degrees_and_pair_degrees_track_the_remaining_matrix(m in matrix(16)) {
        let mut failures = Vec::new();
        let _ = factorize_observed(&m, &FactorizeOptions::default(), |step| {
            let state = step.state;
            let remaining = state.remaining();
            let active: Vec<usize> = state.active().iter().copied().collect();
            if !state.degrees_consistent() {
                failures.push("cached degrees disagree");
            }
            for &j in &active {
                if state.degree(j) != recount_degree(remaining, &active, j) {
                    failures.push("degree differs from recount");
                }
                for z in state.candidate_set(j) {
                    if state.pair_degree(j, z) != brute_pair_degree(remaining, j, z) {
                        failures.push("pair degree differs from union count");
                    }
                }
            }
        });
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }

    #[test]
    fn batched_solve_matches_single(m in matrix(12), seed in 0u64..1000) {
        if let Ok((f, _)) = factorize(&m, &FactorizeOptions::default()) {
            let n = m.n();
            let rhs: Vec<Vec<f64>> = (0..3)
                .map(|k| (0..n).map(|i| ((i as u64 * 31 + seed + k) % 17) as f64 - 8.0).collect())
                .collect();
            let many = solve_many(&f, &rhs).unwrap();
            for (b, x) in rhs.iter().zip(&many) {
                let single = solve(&f, b).unwrap();
                prop_assert_eq!(single.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                                x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
            }
        }
    }

    /// Solving the permuted system gives the permuted solution.
    #[test]
    fn solve_commutes_with_permutation(
        (m, p) in matrix(8).prop_flat_map(|m| {
            let order = Just((0..m.n()).collect::<Vec<_>>()).prop_shuffle();
            (Just(m), order.prop_map(|v| Permutation::from_forward(v).unwrap()))
        }),
        seed in 0u64..1000,
    ) {
        let n = m.n();
        let pm = m.apply_permutation(&p).unwrap();
        let (Ok((f, _)), Ok((g, _))) = (factorize(&m, &FactorizeOptions::default()),
                                        factorize(&pm, &FactorizeOptions::default())) else {
            return Ok(());
        };
        let x_true: Vec<f64> = (0..n).map(|i| ((i as u64 + seed) % 7) as f64 - 3.0).collect();
        let b = m.mul_vec(&x_true).unwrap();
        let pb: Vec<f64> = (0..n).map(|k| b[p.inverse()[k]]).collect();
        let x = solve(&f, &b).unwrap();
        let y = solve(&g, &pb).unwrap();
        // Only well-conditioned draws say anything about agreement.
        prop_assume!(x.iter().zip(&x_true).all(|(a, b)| (a - b).abs() <= 1e-10));
        for k in 0..n {
            prop_assert!((y[k] - x[p.inverse()[k]]).abs() <= 1e-8,
                "position {k}: {} vs {}", y[k], x[p.inverse()[k]]);
        }
    }
}
