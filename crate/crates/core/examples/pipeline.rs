//! Run the whole pipeline from a config file and list what it wrote.
//!
//! ```bash
//! cargo run --release --example pipeline -- crates/core/configs/iris_repro.toml
//! ```

use ctximpute::pipeline::{run_all, PipelineConfig};

fn main() -> ctximpute::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/iris_repro.toml").into());
    let cfg = PipelineConfig::load(&path)?;
    let manifest = run_all(&cfg)?;
    println!("{} files in {}", manifest.files.len(), cfg.output_dir.display());
    for f in &manifest.files {
        println!("  {f}");
    }
    Ok(())
}
