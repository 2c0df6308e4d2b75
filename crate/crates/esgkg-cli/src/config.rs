//! Pipeline configuration file (TOML).
//!
//! Secrets never live in the file: the live backend reads its API key from
//! the environment variable named by `backend.api_key_env`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use esgkg::backend::LlmParams;
use esgkg::extraction::ExtractionMode;
use esgkg::metrics::{ModelPrice, PriceTable};
use esgkg::segmenter::SegmenterConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Live,
    Replay,
    Oracle,
}

impl BackendKind {
    pub fn parse(s: &str) -> Option<BackendKind> {
        match s {
            "live" => Some(BackendKind::Live),
            "replay" => Some(BackendKind::Replay),
            "oracle" => Some(BackendKind::Oracle),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key (live backend).
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Fixture directory (replay backend).
    pub replay_dir: Option<PathBuf>,
    /// When set with the live backend, responses are recorded here as
    /// replay fixtures.
    pub record_dir: Option<PathBuf>,
    /// Ground-truth file (oracle backend).
    pub truth_path: Option<PathBuf>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Oracle,
            endpoint: String::new(),
            model: "unspecified".into(),
            api_key_env: "ESGKG_API_KEY".into(),
            temperature: 0.1,
            max_tokens: 16000,
            replay_dir: None,
            record_dir: None,
            truth_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PricingConfig {
    pub version: String,
    pub models: BTreeMap<String, ModelPrice>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub mode: String,
    pub parallelism: usize,
    pub backend: BackendConfig,
    pub segmentation: SegmenterConfig,
    /// Optional replacement for the built-in few-shot prompt examples.
    pub few_shot_path: Option<PathBuf>,
    pub pricing: PricingConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: "ontology".into(),
            parallelism: 1,
            backend: BackendConfig::default(),
            segmentation: SegmenterConfig::default(),
            few_shot_path: None,
            pricing: PricingConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {} is invalid: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(0.0..=1.0).contains(&self.backend.temperature) {
            return Err(CliError::Input(format!(
                "temperature {} is outside [0, 1]",
                self.backend.temperature
            )));
        }
        if self.parallelism < 1 {
            return Err(CliError::Input("parallelism must be >= 1".into()));
        }
        if self.mode()?.as_str().is_empty() {
            unreachable!();
        }
        Ok(())
    }

    pub fn mode(&self) -> Result<ExtractionMode, CliError> {
        ExtractionMode::parse(&self.mode)
            .ok_or_else(|| CliError::Input(format!("unknown mode {:?}", self.mode)))
    }

    pub fn llm_params(&self) -> LlmParams {
        LlmParams {
            model: self.backend.model.clone(),
            temperature: self.backend.temperature,
            max_tokens: self.backend.max_tokens,
        }
    }

    pub fn price_table(&self) -> PriceTable {
        PriceTable {
            version: if self.pricing.version.is_empty() {
                "unpriced".into()
            } else {
                self.pricing.version.clone()
            },
            models: self.pricing.models.clone(),
        }
    }
}
