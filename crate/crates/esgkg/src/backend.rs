//! Pluggable completion backends.
//!
//! The pipeline talks to a model through [`CompletionBackend`], which has
//! three production-grade implementations:
//!
//! - [`LiveBackend`]: HTTP client for a chat-completions style endpoint,
//!   API key taken from the environment only.
//! - [`ReplayBackend`]: serves recorded responses from fixture files keyed
//!   by the SHA-256 of the prompt, so tests run without network access.
//!   [`RecordingBackend`] wraps any backend and writes those fixtures.
//! - [`OracleBackend`]: answers from a ground-truth table keyed by segment
//!   content, used to verify the pipeline end to end on synthetic corpora.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Input/output token counts for one or many completion calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub input: u64,
    pub output: u64,
}

impl TokenUsage {
    pub fn new(input: u64, output: u64) -> Self {
        TokenUsage { input, output }
    }

    pub fn add(&mut self, other: TokenUsage) {
        self.input += other.input;
        self.output += other.output;
    }

    pub fn total(&self) -> u64 {
        self.input + self.output
    }
}

/// Model generation parameters shared by extraction and semantic validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for LlmParams {
    fn default() -> Self {
        LlmParams { model: "unspecified".to_string(), temperature: 0.1, max_tokens: 16000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub model: String,
}

impl CompletionRequest {
    pub fn new(prompt: String, params: &LlmParams) -> Self {
        CompletionRequest {
            prompt,
            temperature: params.temperature,
            max_tokens: params.max_tokens,
            model: params.model.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub body: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
}

impl CompletionResponse {
    pub fn usage(&self) -> TokenUsage {
        TokenUsage::new(self.input_tokens, self.output_tokens)
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("authentication error: {0}")]
    Auth(String),
    #[error("api error (status {status}): {message}")]
    Api { status: u16, message: String },
    #[error("no recorded fixture for this prompt at {0}")]
    FixtureMissing(PathBuf),
    #[error("fixture {path} is malformed: {message}")]
    FixtureMalformed { path: PathBuf, message: String },
    #[error("no ground truth for this prompt: {0}")]
    NoGroundTruth(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A completion provider. Implementations must be shareable across the
/// bounded-parallel extraction workers.
pub trait CompletionBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError>;
    fn name(&self) -> &str;
}

pub fn sha256_hex(data: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

// ---------------------------------------------------------------------------
// Live backend
// ---------------------------------------------------------------------------

/// HTTP client for a chat-completions style JSON endpoint.
pub struct LiveBackend {
    endpoint: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl LiveBackend {
    /// Builds a live backend, reading the API key from `key_env`. Keys are
    /// never read from configuration files.
    pub fn from_env(endpoint: &str, key_env: &str) -> Result<LiveBackend, BackendError> {
        let api_key = std::env::var(key_env)
            .map_err(|_| BackendError::Auth(format!("environment variable {key_env} is not set")))?;
        if api_key.trim().is_empty() {
            return Err(BackendError::Auth(format!("environment variable {key_env} is empty")));
        }
        Ok(LiveBackend {
            endpoint: endpoint.to_string(),
            api_key,
            client: reqwest::blocking::Client::new(),
        })
    }
}

impl CompletionBackend for LiveBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        let payload = serde_json::json!({
            "model": request.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "messages": [{"role": "user", "content": request.prompt}],
        });
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&payload)
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if status.as_u16() == 401 || status.as_u16() == 403 {
            return Err(BackendError::Auth(format!("status {status}: {text}")));
        }
        if !status.is_success() {
            return Err(BackendError::Api { status: status.as_u16(), message: text });
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| BackendError::Api { status: status.as_u16(), message: e.to_string() })?;
        let body = value["choices"][0]["message"]["content"]
            .as_str()
            .or_else(|| value["content"][0]["text"].as_str())
            .unwrap_or_default()
            .to_string();
        let input_tokens = value["usage"]["prompt_tokens"]
            .as_u64()
            .or_else(|| value["usage"]["input_tokens"].as_u64())
            .unwrap_or(0);
        let output_tokens = value["usage"]["completion_tokens"]
            .as_u64()
            .or_else(|| value["usage"]["output_tokens"].as_u64())
            .unwrap_or(0);
        Ok(CompletionResponse { body, input_tokens, output_tokens })
    }

    fn name(&self) -> &str {
        "live"
    }
}

// ---------------------------------------------------------------------------
// Replay / recording backends
// ---------------------------------------------------------------------------

/// Serves fixture files named `<sha256-of-prompt>.json` from a directory.
pub struct ReplayBackend {
    dir: PathBuf,
}

impl ReplayBackend {
    pub fn new(dir: impl Into<PathBuf>) -> ReplayBackend {
        ReplayBackend { dir: dir.into() }
    }

    pub fn fixture_path(dir: &Path, prompt: &str) -> PathBuf {
        dir.join(format!("{}.json", sha256_hex(prompt.as_bytes())))
    }

    /// Writes one fixture; used by the recording wrapper and by tests.
    pub fn store(dir: &Path, prompt: &str, response: &CompletionResponse) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let path = Self::fixture_path(dir, prompt);
        let text = serde_json::to_string_pretty(response).expect("fixture serializes");
        std::fs::write(path, text)
    }
}

impl CompletionBackend for ReplayBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        let path = Self::fixture_path(&self.dir, &request.prompt);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(BackendError::FixtureMissing(path));
            }
            Err(e) => return Err(BackendError::Io(e)),
        };
        serde_json::from_str(&text)
            .map_err(|e| BackendError::FixtureMalformed { path, message: e.to_string() })
    }

    fn name(&self) -> &str {
        "replay"
    }
}

/// Wraps another backend and records every response as a replay fixture.
pub struct RecordingBackend<B: CompletionBackend> {
    inner: B,
    dir: PathBuf,
}

impl<B: CompletionBackend> RecordingBackend<B> {
    pub fn new(inner: B, dir: impl Into<PathBuf>) -> Self {
        RecordingBackend { inner, dir: dir.into() }
    }
}

impl<B: CompletionBackend> CompletionBackend for RecordingBackend<B> {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        let response = self.inner.complete(request)?;
        ReplayBackend::store(&self.dir, &request.prompt, &response)?;
        Ok(response)
    }

    fn name(&self) -> &str {
        "record"
    }
}

// ---------------------------------------------------------------------------
// Oracle backend
// ---------------------------------------------------------------------------

/// Ground truth for an oracle run: extraction responses keyed by the SHA-256
/// of the segment content, plus entity ids whose semantic type check should
/// come back negative.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OracleTruth {
    pub segment_responses: HashMap<String, String>,
    #[serde(default)]
    pub rejected_ids: HashSet<String>,
}

impl OracleTruth {
    pub fn insert_segment(&mut self, content: &str, body: String) {
        self.segment_responses.insert(sha256_hex(content.as_bytes()), body);
    }
}

/// Marker lines the oracle uses to recover the segment content or entity id
/// from a prompt. These match the prompt templates in the extraction and
/// validation modules.
pub const SEGMENT_START_MARKER: &str = "$$$SEGMENT_START$$$";
pub const SEGMENT_END_MARKER: &str = "$$$SEGMENT_END$$$";
pub const BASELINE_TEXT_MARKER: &str = "Extract from this text:";
pub const SEMANTIC_ID_MARKER: &str = "Entity id:";

/// Deterministic token estimate for offline backends.
fn estimate_tokens(text: &str) -> u64 {
    (text.len() as u64).div_ceil(4)
}

/// Answers extraction prompts from planted ground truth and semantic type
/// checks from a deny-list (affirming everything else).
pub struct OracleBackend {
    truth: OracleTruth,
}

impl OracleBackend {
    pub fn new(truth: OracleTruth) -> OracleBackend {
        OracleBackend { truth }
    }

    fn segment_content(prompt: &str) -> Option<&str> {
        if let Some(start) = prompt.find(SEGMENT_START_MARKER) {
            let rest = &prompt[start + SEGMENT_START_MARKER.len()..];
            let end = rest.find(SEGMENT_END_MARKER)?;
            return Some(rest[..end].trim_matches('\n'));
        }
        if let Some(pos) = prompt.find(BASELINE_TEXT_MARKER) {
            return Some(prompt[pos + BASELINE_TEXT_MARKER.len()..].trim());
        }
        None
    }

    fn semantic_entity_id(prompt: &str) -> Option<&str> {
        for line in prompt.lines() {
            if let Some(rest) = line.trim().strip_prefix(SEMANTIC_ID_MARKER) {
                return Some(rest.trim());
            }
        }
        None
    }
}

impl CompletionBackend for OracleBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        if let Some(content) = Self::segment_content(&request.prompt) {
            let key = sha256_hex(content.as_bytes());
            let body = self
                .truth
                .segment_responses
                .get(&key)
                .ok_or_else(|| BackendError::NoGroundTruth(format!("segment hash {key}")))?;
            return Ok(CompletionResponse {
                body: body.clone(),
                input_tokens: estimate_tokens(&request.prompt),
                output_tokens: estimate_tokens(body),
            });
        }
        if let Some(id) = Self::semantic_entity_id(&request.prompt) {
            let verdict = if self.truth.rejected_ids.contains(id) { "no" } else { "yes" };
            let body = format!("{{\"verdict\": \"{verdict}\"}}");
            let output_tokens = estimate_tokens(&body);
            return Ok(CompletionResponse {
                body,
                input_tokens: estimate_tokens(&request.prompt),
                output_tokens,
            });
        }
        Err(BackendError::NoGroundTruth("prompt carries no segment markers or entity id".into()))
    }

    fn name(&self) -> &str {
        "oracle"
    }
}
