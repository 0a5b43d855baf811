//! Hide 30% of Iris, fill it back with each baseline, and compare the
//! standardized recovery error.
//!
//! ```bash
//! cargo run --example impute_baselines
//! ```

use ctximpute::bundled;
use ctximpute::eval::mask_and_recover;
use ctximpute::impute::{fit_transform, ImputerKind};
use ctximpute::missingness::{inject, Mechanism, MissingnessSpec};
use ctximpute::table::split_eval;

fn main() -> ctximpute::Result<()> {
    let iris = bundled::dataset("iris")?;
    let spec = MissingnessSpec::new(Mechanism::mcar(), 3);
    let kinds = [ImputerKind::Mean, ImputerKind::Knn { k: 5 }, ImputerKind::chained()];

    for kind in &kinds {
        let score = mask_and_recover(&iris, &spec, kind)?;
        println!("{:<10} standardized RMSE {:.4}", kind.label(), score.rmse.unwrap_or(f64::NAN));
    }

    // Fit on a training split, then complete a held-out split with the
    // training statistics only.
    let (train, eval) = split_eval(&inject(&iris, &spec)?, 0.2, 9)?;
    let (filled_train, model) = fit_transform(&train, &ImputerKind::chained())?;
    let filled_eval = model.transform(&eval)?;
    println!(
        "\nchained: {} sweeps (converged: {}), eval rows completed: {}",
        filled_train.sweeps,
        filled_train.converged,
        filled_eval.dataset.n()
    );
    Ok(())
}
