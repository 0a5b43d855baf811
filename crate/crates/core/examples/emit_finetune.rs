//! Write missingness-aware instruction-tuning records for masked Iris.
//!
//! ```bash
//! cargo run --example emit_finetune -- /tmp/iris_records.jsonl
//! ```

use std::path::PathBuf;

use ctximpute::bundled;
use ctximpute::contextual::{render_dataset, DescriptorMode};
use ctximpute::descriptors::load_bundled;
use ctximpute::finetune::{emit_records, read_records};
use ctximpute::missingness::{inject, Mechanism, MissingnessSpec};

fn main() -> ctximpute::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("iris_records.jsonl"));
    let iris = inject(&bundled::dataset("iris")?, &MissingnessSpec::new(Mechanism::mnar(), 0))?;
    let records = render_dataset(&iris, &DescriptorMode::FeatureSpecific(load_bundled("iris")?), true)?;

    let n = emit_records(&records, iris.schema(), true, &out)?;
    println!("wrote {n} records to {}", out.display());
    let first = &read_records(&out)?[0];
    println!("instruction: {}\ninput: {}\noutput: {}", first.instruction, first.input, first.output);
    Ok(())
}
