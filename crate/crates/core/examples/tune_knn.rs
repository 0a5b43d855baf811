//! Pick the k-NN imputer's k by downstream proxy accuracy on a holdout.
//!
//! ```bash
//! cargo run --example tune_knn
//! ```

use ctximpute::bundled;
use ctximpute::eval::KnnProxy;
use ctximpute::impute::{tune_k, DEFAULT_K_GRID};
use ctximpute::missingness::inject_mcar;

fn main() -> ctximpute::Result<()> {
    let masked = inject_mcar(&bundled::dataset("breast_cancer")?, 0.3, 11)?;
    let (best, scores) = tune_k(&masked, &DEFAULT_K_GRID, &KnnProxy { k: 5 }, 11)?;
    for (k, acc) in scores {
        println!("k = {k}: proxy accuracy {acc:.4}");
    }
    println!("chosen k = {best}");
    Ok(())
}
