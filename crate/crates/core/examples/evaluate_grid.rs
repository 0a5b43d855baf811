//! Five repetitions of split, mask, impute and proxy-classify on Wine,
//! rendered as a markdown table.
//!
//! ```bash
//! cargo run --release --example evaluate_grid -- mar
//! ```

use ctximpute::eval::{render_report, run_grid, DatasetRef, ExperimentSpec, ReportFormat};
use ctximpute::missingness::Mechanism;

fn main() -> ctximpute::Result<()> {
    let mechanism = match std::env::args().nth(1).as_deref() {
        Some("mar") => Mechanism::mar(),
        Some("mnar") => Mechanism::mnar(),
        _ => Mechanism::mcar(),
    };
    let spec = ExperimentSpec::new(DatasetRef::bundled("wine"), mechanism, 42);
    let report = run_grid(&spec)?;
    print!("{}", render_report(&report, ReportFormat::Markdown, Some("mean"))?);
    Ok(())
}
