//! Build the descriptor prompt for a schema and obtain a catalog: from the
//! endpoint named in CTXIMPUTE_ENDPOINT_URL / CTXIMPUTE_MODEL when set,
//! otherwise from the bundled catalogs.
//!
//! ```bash
//! cargo run --example descriptor_catalog -- seeds
//! CTXIMPUTE_ENDPOINT_URL=https://host/v1/chat/completions CTXIMPUTE_MODEL=some-model \
//!     CTXIMPUTE_API_KEY=... cargo run --example descriptor_catalog -- wine
//! ```

use ctximpute::bundled;
use ctximpute::descriptors::{build_prompt, DescriptorService};

fn main() -> ctximpute::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "wine".into());
    let schema = bundled::schema(&name)?;
    let prompt = build_prompt(&schema, &schema.description)?;
    println!("--- prompt ---\n{}\n", prompt.text());

    let svc = DescriptorService::from_env(Some(std::env::temp_dir().join("ctximpute-descriptors")))?;
    if svc.is_offline() {
        println!("(no endpoint configured, using the bundled catalog)\n");
    }
    let catalog = svc.descriptors(&schema, &schema.description)?;
    for f in schema.feature_names() {
        println!("{f}: {}", catalog.get(f).unwrap_or("-"));
    }
    Ok(())
}
