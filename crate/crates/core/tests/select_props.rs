use gamc_core::rng;
use gamc_core::select::{dft_score, entropy_bits, rank_features, split_loss};
use gamc_core::Matrix;
use proptest::prelude::*;
use rand::Rng;

/// Best weighted entropy over every threshold between sorted values
/// (`x <= t` left), including the no-split baseline.
fn exhaustive_loss(col: &[f64], y: &[usize]) -> f64 {
    let k = y.iter().max().unwrap() + 1;
    let mut total = vec![0; k];
    y.iter().for_each(|&c| total[c] += 1);
    let mut best = entropy_bits(&total);
    let mut values: Vec<f64> = col.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    for &t in &values {
        let mut l = vec![0; k];
        let mut r = vec![0; k];
        for (v, &c) in col.iter().zip(y) {
            if *v <= t {
                l[c] += 1;
            } else {
                r[c] += 1;
            }
        }
        best = best.min(split_loss(&l, &r));
    }
    best
}

#[test]
fn planted_feature_ranks_first() {
    let mut hits = 0;
    for trial in 0..100u64 {
        let mut r = rng::stream(trial, &[77]);
        let n = 400;
        let y: Vec<usize> = (0..n).map(|i| i % 4).collect();
        let planted = r.random_range(0..101);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..101)
                    .map(|j| if j == planted { y[i] as f64 + 0.3 * rng::normal(&mut r) } else { rng::normal(&mut r) })
                    .collect()
            })
            .collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let ranked = rank_features(&x, &y, 16).unwrap();
        hits += (ranked[0].feature_index == planted) as usize;
    }
    assert!(hits >= 99, "{hits}/100");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn grid_loss_is_never_below_exhaustive(
        data in prop::collection::vec((-5.0f64..5.0, 0usize..3), 2..60),
        bins in 2usize..32,
    ) {
        let (col, y): (Vec<f64>, Vec<usize>) = data.into_iter().unzip();
        prop_assume!(y.iter().any(|&c| c != y[0]));
        let grid = dft_score(&col, &y, bins).unwrap();
        let exact = exhaustive_loss(&col, &y);
        prop_assert!(grid >= exact - 1e-12, "grid {grid} exhaustive {exact}");
        let mut total = vec![0; 3];
        y.iter().for_each(|&c| total[c] += 1);
        prop_assert!(grid <= entropy_bits(&total) + 1e-12);
    }

    #[test]
    fn loss_invariant_under_power_of_two_scaling(
        data in prop::collection::vec((-5.0f64..5.0, 0usize..3), 2..60),
        e in -6i32..6,
    ) {
        let (col, y): (Vec<f64>, Vec<usize>) = data.into_iter().unzip();
        let s = 2f64.powi(e);
        let mapped: Vec<f64> = col.iter().map(|v| v * s).collect();
        prop_assert_eq!(dft_score(&col, &y, 16).unwrap(), dft_score(&mapped, &y, 16).unwrap());
    }

    #[test]
    fn ranking_is_a_permutation_sorted_by_loss(seed in 0u64..1000) {
        let mut r = rng::stream(seed, &[]);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| (0..7).map(|_| rng::normal(&mut r)).collect()).collect();
        let y: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let ranked = rank_features(&Matrix::from_rows(&rows).unwrap(), &y, 8).unwrap();
        let mut idx: Vec<usize> = ranked.iter().map(|s| s.feature_index).collect();
        prop_assert!(ranked.windows(2).all(|w| w[0].loss <= w[1].loss));
        idx.sort();
        prop_assert_eq!(idx, (0..7).collect::<Vec<_>>());
    }
}
