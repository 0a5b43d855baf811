//! Missing-value descriptors: bundled catalogs, the prompt sent to a
//! conversational model, the line-oriented response parser, and a cached
//! chat-completions client.

mod cache;
mod catalog;
mod client;
mod prompt;

pub use cache::{CacheEntry, DescriptorCache};
pub use catalog::{descriptor_sentence, load_bundled, DescriptorCatalog, Provenance, BUNDLED};
pub(crate) use catalog::canonical_name;
pub use client::{DescriptorService, EndpointConfig, ENV_API_KEY, ENV_ENDPOINT, ENV_MODEL};
pub use prompt::{build_prompt, parse_response, PromptSpec, DESCRIPTOR_REQUEST};
