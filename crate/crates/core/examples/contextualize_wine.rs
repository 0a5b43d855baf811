//! Render Wine rows as sentences with feature-specific descriptors and with
//! a generic token, then parse one line back.
//!
//! ```bash
//! cargo run --example contextualize_wine
//! ```

use ctximpute::bundled;
use ctximpute::contextual::{parse_line, render_dataset, DescriptorMode, GENERIC_TOKENS};
use ctximpute::descriptors::load_bundled;
use ctximpute::missingness::inject_mcar;

fn main() -> ctximpute::Result<()> {
    let wine = inject_mcar(&bundled::dataset("wine")?, 0.3, 5)?;
    let specific = DescriptorMode::FeatureSpecific(load_bundled("wine")?);

    let records = render_dataset(&wine, &specific, true)?;
    println!("{}\n", records[95].line());

    for token in GENERIC_TOKENS {
        let mode = DescriptorMode::generic(token)?;
        let line = render_dataset(&wine, &mode, false)?[95].line();
        println!("[{token}] {line}\n");
    }

    let back = parse_line(&records[95].line(), 95, wine.schema(), &specific)?;
    let missing: Vec<&str> = back
        .missing_flags
        .iter()
        .zip(wine.schema().feature_names())
        .filter(|(m, _)| **m)
        .map(|(_, f)| f)
        .collect();
    println!("missing after parse-back: {missing:?}");
    Ok(())
}
