use std::path::PathBuf;
use std::thread;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value as Json};

use super::cache::{CacheEntry, DescriptorCache};
use super::catalog::{load_bundled, DescriptorCatalog, Provenance};
use super::prompt::{build_prompt, parse_response, PromptSpec};
use crate::error::{Error, Result};
use crate::table::Schema;

pub const ENV_ENDPOINT: &str = "CTXIMPUTE_ENDPOINT_URL";
pub const ENV_API_KEY: &str = "CTXIMPUTE_API_KEY";
pub const ENV_MODEL: &str = "CTXIMPUTE_MODEL";

const SYSTEM_MESSAGE: &str = "You write short missing-value descriptors for tabular datasets.";

/// A chat-completions endpoint.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    /// Full URL of the completions route.
    pub url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub backoff: Duration,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            api_key: None,
            model: model.into(),
            timeout: Duration::from_secs(60),
            attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }

    /// Reads the endpoint URL, model id and optional key from the
    /// environment; `None` when URL or model is unset.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(ENV_ENDPOINT).ok().filter(|s| !s.is_empty())?;
        let model = std::env::var(ENV_MODEL).ok().filter(|s| !s.is_empty())?;
        let mut cfg = EndpointConfig::new(url, model);
        cfg.api_key = std::env::var(ENV_API_KEY).ok().filter(|s| !s.is_empty());
        Some(cfg)
    }
}

enum Failure {
    Transient(String),
    Fatal(Error),
}

/// Fetches descriptor catalogs, preferring the cache and falling back to
/// the bundled catalogs when no endpoint is configured.
#[derive(Debug)]
pub struct DescriptorService {
    endpoint: Option<EndpointConfig>,
    cache: Option<DescriptorCache>,
}

impl DescriptorService {
    pub fn offline() -> Self {
        DescriptorService {
            endpoint: None,
            cache: None,
        }
    }

    pub fn new(endpoint: Option<EndpointConfig>, cache: Option<DescriptorCache>) -> Self {
        DescriptorService { endpoint, cache }
    }

    /// Endpoint from the environment, cache in `cache_dir` when given.
    pub fn from_env(cache_dir: Option<PathBuf>) -> Result<Self> {
        let cache = cache_dir.map(DescriptorCache::open).transpose()?;
        Ok(DescriptorService::new(EndpointConfig::from_env(), cache))
    }

    pub fn is_offline(&self) -> bool {
        self.endpoint.is_none()
    }

    /// Catalog for `schema`: the bundled one when offline, otherwise the
    /// endpoint's answer to [`build_prompt`].
    pub fn descriptors(&self, schema: &Schema, description: &str) -> Result<DescriptorCatalog> {
        if self.endpoint.is_none() {
            let cat = load_bundled(&schema.dataset)?;
            cat.validate(schema)?;
            return Ok(cat);
        }
        let prompt = build_prompt(schema, description)?;
        let cat = self.request_descriptors(&prompt)?;
        cat.validate(schema)?;
        Ok(cat)
    }

    pub fn request_descriptors(&self, prompt: &PromptSpec) -> Result<DescriptorCatalog> {
        let endpoint = self
            .endpoint
            .as_ref()
            .ok_or_else(|| Error::Network("no endpoint configured".into()))?;
        let Some(cache) = &self.cache else {
            return fetch(endpoint, prompt);
        };
        let key = DescriptorCache::key(prompt, &endpoint.model);
        let lock = cache.lock_for(&key);
        let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(hit) = cache.get(&key)? {
            return Ok(hit.catalog);
        }
        let catalog = fetch(endpoint, prompt)?;
        let created_at = match &catalog.provenance {
            Provenance::Remote { timestamp, .. } => *timestamp,
            Provenance::Bundled => 0,
        };
        cache.put(&CacheEntry {
            key,
            model: endpoint.model.clone(),
            created_at,
            catalog: catalog.clone(),
        })?;
        Ok(catalog)
    }
}

fn fetch(endpoint: &EndpointConfig, prompt: &PromptSpec) -> Result<DescriptorCatalog> {
    let content = send_with_retry(endpoint, prompt)?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    parse_response(
        prompt,
        &content,
        Provenance::Remote {
            model: endpoint.model.clone(),
            timestamp,
        },
    )
}

fn send_with_retry(endpoint: &EndpointConfig, prompt: &PromptSpec) -> Result<String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(endpoint.timeout))
        .build()
        .into();
    let body = json!({
        "model": endpoint.model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": SYSTEM_MESSAGE},
            {"role": "user", "content": prompt.text()},
        ],
    });
    let attempts = endpoint.attempts.max(1);
    let mut delay = endpoint.backoff;
    let mut last = String::new();
    for attempt in 1..=attempts {
        match send_once(&agent, endpoint, &body) {
            Ok(content) => return Ok(content),
            Err(Failure::Fatal(e)) => return Err(e),
            Err(Failure::Transient(msg)) => last = msg,
        }
        if attempt < attempts {
            thread::sleep(delay);
            delay *= 2;
        }
    }
    Err(Error::Network(format!("{last} (after {attempts} attempts)")))
}

fn send_once(agent: &ureq::Agent, endpoint: &EndpointConfig, body: &Json) -> std::result::Result<String, Failure> {
    let mut req = agent.post(&endpoint.url);
    if let Some(key) = &endpoint.api_key {
        req = req.header("Authorization", &format!("Bearer {key}"));
    }
    let mut resp = req
        .send_json(body)
        .map_err(|e| Failure::Transient(e.to_string()))?;
    let status = resp.status().as_u16();
    let text = resp
        .body_mut()
        .read_to_string()
        .map_err(|e| Failure::Transient(e.to_string()))?;
    match status {
        200..=299 => {}
        401 | 403 => return Err(Failure::Fatal(Error::Auth(format!("HTTP {status}")))),
        429 | 500..=599 => return Err(Failure::Transient(format!("HTTP {status}"))),
        _ => return Err(Failure::Fatal(Error::Network(format!("HTTP {status}: {text}")))),
    }
    let json: Json = serde_json::from_str(&text)
        .map_err(|_| Failure::Fatal(Error::MalformedResponse(text.clone())))?;
    json.pointer("/choices/0/message/content")
        .and_then(Json::as_str)
        .map(str::to_string)
        .ok_or_else(|| Failure::Fatal(Error::MalformedResponse("no choices[0].message.content".into())))
}
