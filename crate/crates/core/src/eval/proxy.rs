use crate::error::{Error, Result};
use crate::impute::{DownstreamProxy, ImputedDataset};
use crate::table::{mean, std_dev, ColumnKind, Dataset};

/// k-NN majority vote over z-scored features (statistics from the training
/// table); categorical features contribute a 0/1 mismatch. Distance ties go
/// to the lower training index and vote ties to the smaller class index. A
/// `k` above the training size uses every training row.
pub fn classify(train: &Dataset, eval: &Dataset, k: usize) -> Result<Vec<usize>> {
    if train.n() == 0 {
        return Err(Error::EmptyTrain);
    }
    if eval.n() == 0 {
        return Err(Error::EmptyEval);
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if train.schema().feature_names().ne(eval.schema().feature_names()) {
        return Err(Error::Shape("train and eval tables have different features".into()));
    }
    if train.mask().any() || eval.mask().any() {
        return Err(Error::Shape("proxy classification needs completed tables".into()));
    }
    let d = train.d();
    let scale: Vec<(f64, f64)> = (0..d)
        .map(|j| {
            let col = train.observed_column(j);
            let s = std_dev(&col);
            (mean(&col), if s > 0.0 { s } else { 1.0 })
        })
        .collect();
    let z = |ds: &Dataset, i: usize| -> Vec<f64> {
        (0..d)
            .map(|j| {
                let v = ds.get(i, j).expect("completed");
                match ds.kind(j) {
                    ColumnKind::Continuous => (v - scale[j].0) / scale[j].1,
                    ColumnKind::Categorical => v,
                }
            })
            .collect()
    };
    let train_z: Vec<Vec<f64>> = (0..train.n()).map(|i| z(train, i)).collect();
    let kinds: Vec<ColumnKind> = (0..d).map(|j| train.kind(j)).collect();
    let classes = train.schema().target.labels.len();
    let k = k.min(train.n());
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(train.n());
    let mut preds = Vec::with_capacity(eval.n());
    for i in 0..eval.n() {
        let q = z(eval, i);
        order.clear();
        order.extend(train_z.iter().enumerate().map(|(r, t)| {
            let dist: f64 = (0..d)
                .map(|j| match kinds[j] {
                    ColumnKind::Continuous => (q[j] - t[j]).powi(2),
                    ColumnKind::Categorical => f64::from(u8::from(q[j] != t[j])),
                })
                .sum();
            (dist, r)
        }));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0usize; classes];
        for &(_, r) in &order[..k] {
            votes[train.target(r)] += 1;
        }
        let best = (0..classes)
            .max_by(|&a, &b| votes[a].cmp(&votes[b]).then(b.cmp(&a)))
            .expect("at least one class");
        preds.push(best);
    }
    Ok(preds)
}

/// Accuracy of [`classify`] on the evaluation table's targets.
pub fn proxy_classify(train: &ImputedDataset, eval: &ImputedDataset, k: usize) -> Result<f64> {
    let preds = classify(&train.dataset, &eval.dataset, k)?;
    let hits = preds
        .iter()
        .zip(eval.dataset.targets())
        .filter(|(p, t)| p == t)
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

/// [`proxy_classify`] as the scoring function for k tuning.
#[derive(Debug, Clone, Copy)]
pub struct KnnProxy {
    pub k: usize,
}

impl DownstreamProxy for KnnProxy {
    fn score(&self, train: &ImputedDataset, eval: &ImputedDataset) -> Result<f64> {
        proxy_classify(train, eval, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impute::impute_mean;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn wrap(ds: &Dataset) -> ImputedDataset {
        impute_mean(ds).unwrap()
    }

    #[test]
    fn duplicate_row_is_recovered() {
        let train = Dataset::from_columns(&[vec![0.0, 5.0, 9.0], vec![1.0, 3.0, 2.0]], vec![0, 1, 2], &["a", "b", "c"]).unwrap();
        let eval = train.select_rows(&[1]).unwrap();
        assert_eq!(proxy_classify(&wrap(&train), &wrap(&eval), 1).unwrap(), 1.0);
    }

    // Two blobs 10 sigma apart: every neighbour shares the query's class,
    // which a brute-force scan over all pairs confirms before scoring.
    #[test]
    fn separated_blobs() {
        let mut rng = crate::seed::rng(3, &[b"blobs"]);
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut t = Vec::new();
        for i in 0..120 {
            let c = i % 2;
            let off = 10.0 * c as f64;
            x.push(off + 0.5 * Distribution::<f64>::sample(&StandardNormal, &mut rng));
            y.push(0.5 * Distribution::<f64>::sample(&StandardNormal, &mut rng));
            t.push(c);
        }
        let ds = Dataset::from_columns(&[x.clone(), y.clone()], t.clone(), &["a", "b"]).unwrap();
        let train_idx: Vec<usize> = (0..100).collect();
        let eval_idx: Vec<usize> = (100..120).collect();
        let max_within = train_idx
            .iter()
            .flat_map(|&a| eval_idx.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| t[a] == t[b])
            .map(|(a, b)| (x[a] - x[b]).hypot(y[a] - y[b]))
            .fold(0.0, f64::max);
        let min_across = train_idx
            .iter()
            .flat_map(|&a| eval_idx.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| t[a] != t[b])
            .map(|(a, b)| (x[a] - x[b]).hypot(y[a] - y[b]))
            .fold(f64::INFINITY, f64::min);
        assert!(max_within < min_across);
        let train = ds.select_rows(&train_idx).unwrap();
        let eval = ds.select_rows(&eval_idx).unwrap();
        assert_eq!(proxy_classify(&wrap(&train), &wrap(&eval), 3).unwrap(), 1.0);
    }

    #[test]
    fn permuted_labels_score_near_chance() {
        let mut total = 0.0;
        let seeds = 40;
        for s in 0..seeds {
            let mut rng = crate::seed::rng(s, &[b"chance"]);
            let cols: Vec<Vec<f64>> = (0..3).map(|_| (0..150).map(|_| rng.random::<f64>()).collect()).collect();
            let t: Vec<usize> = (0..150).map(|_| rng.random_range(0..3)).collect();
            let ds = Dataset::from_columns(&cols, t, &["a", "b", "c"]).unwrap();
            let (tr, ev) = crate::table::split_eval(&ds, 0.2, s).unwrap();
            total += proxy_classify(&wrap(&tr), &wrap(&ev), 5).unwrap();
        }
        let avg = total / seeds as f64;
        assert!((avg - 1.0 / 3.0).abs() < 0.05, "avg = {avg}");
    }

    #[test]
    fn vote_ties_go_to_smaller_class() {
        let train = Dataset::from_columns(&[vec![-1.0, 1.0]], vec![1, 0], &["a", "b"]).unwrap();
        let eval = Dataset::from_columns(&[vec![0.0]], vec![0], &["a", "b"]).unwrap();
        assert_eq!(classify(&train, &eval, 2).unwrap(), vec![0]);
        assert_eq!(classify(&train, &eval, 9).unwrap(), vec![0]);
        assert!(classify(&train, &eval, 0).is_err());
    }
}
