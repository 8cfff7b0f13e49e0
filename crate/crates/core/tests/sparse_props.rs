use gamc_core::rng;
use gamc_core::sparse::{learn_dictionary, max_abs_pool, omp_encode, omp_path, Dictionary};
use proptest::prelude::*;

fn random_dict(dim: usize, n: usize, seed: u64) -> Dictionary {
    let mut r = rng::stream(seed, &[]);
    let mut atoms = Vec::with_capacity(dim * n);
    for _ in 0..n {
        let v: Vec<f64> = (0..dim).map(|_| rng::normal(&mut r)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        atoms.extend(v.iter().map(|x| x / s));
    }
    Dictionary::from_columns(dim, n, atoms).unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn k1_matches_exhaustive_correlation() {
    let d = random_dict(16, 64, 9);
    let mut r = rng::stream(10, &[]);
    for _ in 0..200 {
        let x: Vec<f64> = (0..16).map(|_| rng::normal(&mut r)).collect();
        let mut best = 0;
        for j in 1..64 {
            if dot(d.atom(j), &x).abs() > dot(d.atom(best), &x).abs() {
                best = j;
            }
        }
        let code = omp_encode(&x, &d, 1).unwrap();
        assert_eq!(code.support, vec![best]);
        let expect = dot(d.atom(best), &x);
        assert!((code.coefficients[best] - expect).abs() < 1e-12);
    }
}

#[test]
fn full_square_dictionary_reconstructs_exactly() {
    let d = random_dict(8, 8, 3);
    let x: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
    let code = omp_encode(&x, &d, 8).unwrap();
    let xn = dot(&x, &x).sqrt();
    assert!(code.residual_norm / xn < 1e-8);
    let rec = d.reconstruct(&code.coefficients);
    assert!(rec.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-8));
}

#[test]
fn dictionary_learning_trace_and_norms() {
    let mut r = rng::stream(12, &[]);
    let windows: Vec<Vec<f64>> = (0..300).map(|_| (0..16).map(|_| rng::normal(&mut r)).collect()).collect();
    for iters in [1, 5, 20] {
        let l = learn_dictionary(&windows, 32, 3, iters, 5).unwrap();
        assert_eq!(l.error_trace.len(), iters + 1);
        for w in l.error_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-6), "{:?}", l.error_trace);
        }
        for j in 0..32 {
            assert!((l.dictionary.atom_norm(j) - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_never_grows_with_k(seed in 0u64..10_000, xs in prop::collection::vec(-3.0f64..3.0, 16)) {
        let d = random_dict(16, 64, seed);
        let path = omp_path(&xs, &d, 6).unwrap();
        for (i, c) in path.iter().enumerate() {
            prop_assert!(c.support.len() <= i + 1);
            let nz = c.coefficients.iter().filter(|v| **v != 0.0).count();
            prop_assert!(nz <= c.support.len());
            for (j, v) in c.coefficients.iter().enumerate() {
                if !c.support.contains(&j) {
                    prop_assert_eq!(*v, 0.0);
                }
            }
        }
        for w in path.windows(2) {
            prop_assert!(w[1].residual_norm <= w[0].residual_norm + 1e-12);
        }
        // path entries equal independent encodes
        let c3 = omp_encode(&xs, &d, 3).unwrap();
        prop_assert_eq!(&c3, &path[2]);
    }

    #[test]
    fn pooling_ignores_window_order(codes in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 8), 1..6), rot in 0usize..6) {
        let a = max_abs_pool(codes.iter().map(Vec::as_slice), 8);
        let mut shuffled = codes.clone();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let b = max_abs_pool(shuffled.iter().map(Vec::as_slice), 8);
        prop_assert_eq!(a, b);
    }
}
