use rand::seq::index;

use crate::error::{Error, Result};
use crate::seed;
use crate::table::dataset::Dataset;
use crate::table::stats::round_count;

/// Row indices of a seeded (train, eval) partition of `n` rows, each side
/// in ascending order. The eval side holds round(fraction * n) rows.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidFraction {
            name: "eval fraction",
            value: fraction,
            range: "(0, 1)",
        });
    }
    let eval_n = round_count(fraction, n);
    if eval_n == 0 || eval_n >= n {
        return Err(Error::DegenerateSplit {
            train: n.saturating_sub(eval_n),
            eval: eval_n,
        });
    }
    let mut rng = seed::rng(seed, &[b"split"]);
    let mut in_eval = vec![false; n];
    for i in index::sample(&mut rng, n, eval_n) {
        in_eval[i] = true;
    }
    let (eval, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| in_eval[i]);
    Ok((train, eval))
}

/// Splits a dataset into (train, eval), carrying masks and targets.
pub fn split_eval(ds: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, eval) = split_indices(ds.n(), fraction, seed)?;
    Ok((ds.select_rows(&train)?, ds.select_rows(&eval)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(n: usize) -> Dataset {
        Dataset::from_columns(&[(0..n).map(|i| i as f64).collect()], vec![0; n], &["a"]).unwrap()
    }

    #[test]
    fn sizes() {
        let (tr, ev) = split_eval(&ds(150), 0.20, 7).unwrap();
        assert_eq!((tr.n(), ev.n()), (120, 30));
        let (tr, ev) = split_eval(&ds(5), 0.20, 99).unwrap();
        assert_eq!((tr.n(), ev.n()), (4, 1));
    }

    #[test]
    fn deterministic() {
        assert_eq!(split_indices(150, 0.2, 7).unwrap(), split_indices(150, 0.2, 7).unwrap());
        assert_ne!(split_indices(150, 0.2, 7).unwrap(), split_indices(150, 0.2, 8).unwrap());
    }

    #[test]
    fn degenerate() {
        assert!(matches!(split_indices(2, 0.1, 0), Err(Error::DegenerateSplit { .. })));
        assert!(matches!(split_indices(2, 0.9, 0), Err(Error::DegenerateSplit { .. })));
        assert!(matches!(split_indices(10, 0.0, 0), Err(Error::InvalidFraction { .. })));
    }

    proptest! {
        #[test]
        fn disjoint_and_exhaustive(n in 2usize..300, f in 0.05f64..0.95, s in any::<u64>()) {
            if let Ok((tr, ev)) = split_indices(n, f, s) {
                let mut all: Vec<usize> = tr.iter().chain(ev.iter()).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
                prop_assert_eq!(ev.len(), round_count(f, n));
            }
        }
    }
}
