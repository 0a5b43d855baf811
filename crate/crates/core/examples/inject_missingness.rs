//! Mask the bundled Wine table under each mechanism and print the
//! per-feature missing counts.
//!
//! ```bash
//! cargo run --example inject_missingness
//! ```

use ctximpute::bundled;
use ctximpute::missingness::{audit, inject, mar_subset, MarParams, Mechanism, MissingnessSpec};
use ctximpute::table::QuantileMethod;

fn main() -> ctximpute::Result<()> {
    let wine = bundled::dataset("wine")?;
    println!("wine: {} rows x {} features\n", wine.n(), wine.d());

    for mechanism in [Mechanism::mcar(), Mechanism::mar(), Mechanism::mnar()] {
        let spec = MissingnessSpec::new(mechanism, 17);
        let masked = inject(&wine, &spec)?;
        let report = audit(&masked);
        println!("{:<5} {:>4} cells masked ({:.1}%)", spec.mechanism.name(), report.missing_cells, 100.0 * report.fraction);
        for f in report.features.iter().take(4) {
            println!("      {:<20} {:>3}", f.name, f.missing);
        }
    }

    // the MAR subset: rows whose first feature sits at or below its 30th percentile
    let subset = mar_subset(&wine, &MarParams::default(), QuantileMethod::Linear)?;
    println!("\nMAR subset size: {} rows", subset.len());
    Ok(())
}
