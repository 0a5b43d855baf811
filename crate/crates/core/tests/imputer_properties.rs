//! Invariants every imputer must keep, checked on random tables.

use proptest::prelude::*;
use rand::Rng;

use ctximpute::impute::{impute, impute_knn, impute_mean, ImputerKind};
use ctximpute::missingness::inject_mcar;
use ctximpute::seed;
use ctximpute::table::{Dataset, Mask};

fn random_table(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed, &[b"table"]);
    (0..d).map(|_| (0..n).map(|_| rng.random_range(-50.0..50.0)).collect()).collect()
}

fn kinds() -> [ImputerKind; 4] {
    [ImputerKind::Mean, ImputerKind::Knn { k: 1 }, ImputerKind::Knn { k: 3 }, ImputerKind::chained()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn observed_cells_bit_exact_and_nothing_left_missing(
        seed in any::<u64>(),
        n in 12usize..40,
        d in 2usize..5,
        rate in 0.05f64..0.5,
    ) {
        let cols = random_table(n, d, seed);
        let full = Dataset::from_columns(&cols, vec![0; n], &["a"]).unwrap();
        let ds = inject_mcar(&full, rate, seed).unwrap();
        for kind in kinds() {
            let out = impute(&ds, &kind).unwrap();
            prop_assert!(!out.dataset.mask().any());
            prop_assert_eq!(&out.original_mask, ds.mask());
            for (j, col) in cols.iter().enumerate() {
                for (i, v) in col.iter().enumerate() {
                    let got = out.dataset.get(i, j).unwrap();
                    prop_assert!(got.is_finite());
                    if !ds.is_missing(i, j) {
                        prop_assert_eq!(got.to_bits(), v.to_bits());
                    }
                }
            }
        }
    }

    #[test]
    fn mean_matches_brute_force(seed in any::<u64>(), n in 2usize..30, d in 1usize..4) {
        let cols = random_table(n, d, seed);
        let mut rng = seed::rng(seed, &[b"mask"]);
        let mut mask = Mask::new(n, d);
        for j in 0..d {
            for i in 1..n {
                mask.set(i, j, rng.random_bool(0.5));
            }
        }
        let ds = Dataset::from_columns(&cols, vec![0; n], &["a"]).unwrap().with_mask(mask.clone()).unwrap();
        let out = impute_mean(&ds).unwrap();
        for (j, col) in cols.iter().enumerate() {
            let obs: Vec<f64> = (0..n).filter(|&i| !mask.get(i, j)).map(|i| col[i]).collect();
            let m = obs.iter().sum::<f64>() / obs.len() as f64;
            for i in (0..n).filter(|&i| mask.get(i, j)) {
                prop_assert!((out.dataset.get(i, j).unwrap() - m).abs() <= 1e-9 * m.abs().max(1.0));
            }
        }
    }

    // With every observed donor in play, k-NN averages the whole column.
    #[test]
    fn knn_with_all_donors_is_the_mean(seed in any::<u64>(), n in 6usize..30) {
        let cols = random_table(n, 3, seed);
        let full = Dataset::from_columns(&cols, vec![0; n], &["a"]).unwrap();
        let mcar = inject_mcar(&full, 0.3, seed).unwrap();
        let mut mask = Mask::new(n, 3);
        for i in 0..n {
            mask.set(i, 0, mcar.is_missing(i, 0));
        }
        let ds = full.with_mask(mask).unwrap();
        let k = n - ds.mask().column_count(0);
        let knn = impute_knn(&ds, k).unwrap();
        let mean = impute_mean(&ds).unwrap();
        for i in (0..n).filter(|&i| ds.is_missing(i, 0)) {
            let (a, b) = (knn.dataset.get(i, 0).unwrap(), mean.dataset.get(i, 0).unwrap());
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }
}

// On independent columns the regressions have nothing to explain, so the
// chained imputations stay close to the column means.
#[test]
fn chained_on_independent_noise_tracks_the_mean() {
    for s in 0..5 {
        let cols = random_table(600, 3, s);
        let full = Dataset::from_columns(&cols, vec![0; 600], &["a"]).unwrap();
        let ds = inject_mcar(&full, 0.3, s).unwrap();
        let chained = impute(&ds, &ImputerKind::chained()).unwrap();
        let mean = impute_mean(&ds).unwrap();
        let gaps: Vec<f64> = ds
            .mask()
            .cells()
            .map(|(i, j)| (chained.dataset.get(i, j).unwrap() - mean.dataset.get(i, j).unwrap()).abs())
            .collect();
        // uniform(-50, 50) has std ~28.9; fitted slopes are O(1/sqrt(n))
        let avg = gaps.iter().sum::<f64>() / gaps.len() as f64;
        assert!(avg < 0.1 * 28.9, "seed {s}: mean gap {avg}");
    }
}
