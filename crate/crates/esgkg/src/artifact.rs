//! On-disk artifact formats.
//!
//! Every stage writes one JSON artifact carrying a schema version and the
//! SHA-256 of the artifact it was computed from, so a finished run is an
//! auditable hash chain. Writes go through a temp file and rename, which
//! keeps a failed run from corrupting an existing artifact. The validation
//! report is line-delimited JSON: one violation per line, then a summary
//! record, then a metrics record once scoring has run.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{sha256_hex, TokenUsage};
use crate::consolidation::IdResolutionMap;
use crate::extraction::{DocumentExtraction, ExtractionMode};
use crate::graph::KnowledgeGraph;
use crate::metrics::{compute_quality_metrics, CostLedger, ExtractedCounts, MetricsError, PriceTable, QualityMetrics};
use crate::segmenter::SegmentedDocument;
use crate::validation::{Counts, PassCount, ValidationReport, Violation};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not a valid artifact: {message}")]
    Malformed { path: String, message: String },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

fn io_err(path: &Path, source: std::io::Error) -> ArtifactError {
    ArtifactError::Io { path: path.display().to_string(), source }
}

fn bad(path: &Path, message: impl ToString) -> ArtifactError {
    ArtifactError::Malformed { path: path.display().to_string(), message: message.to_string() }
}

/// Atomic text write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ArtifactError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        file.write_all(contents.as_bytes()).map_err(|e| io_err(&tmp, e))?;
        file.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn sha256_of_file(path: &Path) -> Result<String, ArtifactError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// Reproducible-build style timestamp: the SOURCE_DATE_EPOCH environment
/// variable when set, otherwise none. Wall clocks would break the
/// byte-identical rerun guarantee.
pub fn reproducible_timestamp() -> Option<String> {
    std::env::var("SOURCE_DATE_EPOCH").ok().filter(|v| !v.trim().is_empty())
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifacts serialize");
    text.push('\n');
    text
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ArtifactError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| bad(path, e))
}

// ---------------------------------------------------------------------------
// Stage 1 artifact
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFile {
    pub schema_version: u32,
    pub input_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub document: SegmentedDocument,
}

impl SegmentFile {
    pub fn new(document: SegmentedDocument, input_sha256: String) -> SegmentFile {
        SegmentFile {
            schema_version: SCHEMA_VERSION,
            input_sha256,
            generated_at: reproducible_timestamp(),
            document,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ArtifactError> {
        write_atomic(path, &to_pretty_json(self))
    }

    pub fn load(path: &Path) -> Result<SegmentFile, ArtifactError> {
        read_json(path)
    }
}

// ---------------------------------------------------------------------------
// Stage 2 artifact
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionFile {
    pub schema_version: u32,
    pub input_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub backend: String,
    pub extraction: DocumentExtraction,
}

impl ExtractionFile {
    pub fn new(extraction: DocumentExtraction, backend: &str, input_sha256: String) -> ExtractionFile {
        ExtractionFile {
            schema_version: SCHEMA_VERSION,
            input_sha256,
            generated_at: reproducible_timestamp(),
            backend: backend.to_string(),
            extraction,
        }
    }

    pub fn raw_counts(&self) -> ExtractedCounts {
        ExtractedCounts {
            entities: self.extraction.entity_count(),
            relationships: self.extraction.relationship_count(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), ArtifactError> {
        write_atomic(path, &to_pretty_json(self))
    }

    pub fn load(path: &Path) -> Result<ExtractionFile, ArtifactError> {
        read_json(path)
    }
}

// ---------------------------------------------------------------------------
// Graph artifacts (consolidated and validated)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub doc_id: String,
    pub doc_title: String,
    pub mode: ExtractionMode,
    pub model: String,
    /// Raw Stage 2 output sizes, the denominators for retention and waste.
    pub raw_counts: ExtractedCounts,
    pub stage2_tokens: TokenUsage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub schema_version: u32,
    pub input_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub meta: GraphMeta,
    pub graph: KnowledgeGraph,
    #[serde(default)]
    pub resolution_map: IdResolutionMap,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl GraphFile {
    pub fn save(&self, path: &Path) -> Result<(), ArtifactError> {
        write_atomic(path, &to_pretty_json(self))
    }

    pub fn load(path: &Path) -> Result<GraphFile, ArtifactError> {
        read_json(path)
    }
}

// ---------------------------------------------------------------------------
// Validation report (JSONL) and metrics summary
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record")]
pub enum ReportRecord {
    #[serde(rename = "violation")]
    Violation {
        phase: u8,
        #[serde(flatten)]
        violation: Violation,
    },
    #[serde(rename = "summary")]
    Summary(ReportSummary),
    #[serde(rename = "metrics")]
    Metrics(MetricsRecord),
}

/// Everything metrics need, carried forward from earlier stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub doc_id: String,
    pub mode: ExtractionMode,
    pub model: String,
    pub input_sha256: String,
    pub raw_counts: ExtractedCounts,
    pub input_counts: Counts,
    pub per_rule_pass: BTreeMap<String, PassCount>,
    pub phase1_removed_counts: Counts,
    pub phase2_removed_counts: Counts,
    pub output_counts: Counts,
    pub semantic_calls: u64,
    pub stage2_tokens: TokenUsage,
    pub stage3_tokens: TokenUsage,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ReportSummary {
    pub fn from_report(
        report: &ValidationReport,
        meta: &GraphMeta,
        input_sha256: String,
    ) -> ReportSummary {
        ReportSummary {
            doc_id: meta.doc_id.clone(),
            mode: meta.mode,
            model: meta.model.clone(),
            input_sha256,
            raw_counts: meta.raw_counts,
            input_counts: report.input_counts,
            per_rule_pass: report.per_rule_pass.clone(),
            phase1_removed_counts: report.phase1_removed_counts,
            phase2_removed_counts: report.phase2_removed_counts,
            output_counts: report.output_counts,
            semantic_calls: report.semantic_calls,
            stage2_tokens: meta.stage2_tokens,
            stage3_tokens: report.token_usage,
            warnings: report.warnings.clone(),
        }
    }

    /// Rebuilds the count-bearing part of a validation report, enough to
    /// recompute every metric. Violation logs live in the JSONL lines.
    pub fn to_report(&self) -> ValidationReport {
        ValidationReport {
            input_counts: self.input_counts,
            phase1_removed: Vec::new(),
            phase2_removed: Vec::new(),
            per_rule_pass: self.per_rule_pass.clone(),
            phase1_removed_counts: self.phase1_removed_counts,
            phase2_removed_counts: self.phase2_removed_counts,
            output_counts: self.output_counts,
            semantic_calls: self.semantic_calls,
            token_usage: self.stage3_tokens,
            warnings: self.warnings.clone(),
        }
    }

    /// Scores the run: the five quality metrics plus the priced ledger.
    pub fn score(&self, prices: &PriceTable) -> Result<(QualityMetrics, CostLedger), ArtifactError> {
        let ledger =
            CostLedger::from_usage(&self.model, self.stage2_tokens, self.stage3_tokens, prices);
        let metrics = compute_quality_metrics(self.raw_counts, &self.to_report(), &ledger)?;
        Ok((metrics, ledger))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub doc_id: String,
    pub mode: ExtractionMode,
    pub model: String,
    pub price_table_version: String,
    pub metrics: QualityMetrics,
    pub ledger: CostLedger,
}

/// Standalone machine-readable metrics summary; the same record is also
/// appended to the validation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub schema_version: u32,
    pub input_sha256: String,
    #[serde(flatten)]
    pub record: MetricsRecord,
}

impl MetricsFile {
    pub fn new(record: MetricsRecord, input_sha256: String) -> MetricsFile {
        MetricsFile { schema_version: SCHEMA_VERSION, input_sha256, record }
    }

    pub fn save(&self, path: &Path) -> Result<(), ArtifactError> {
        write_atomic(path, &to_pretty_json(self))
    }

    pub fn load(path: &Path) -> Result<MetricsFile, ArtifactError> {
        read_json(path)
    }
}

/// Renders the full report: violation lines (phase 1 then phase 2, stable
/// field order), the summary record, and optionally the metrics record.
pub fn render_report(
    report: &ValidationReport,
    summary: &ReportSummary,
    metrics: Option<&MetricsRecord>,
) -> String {
    let mut out = String::new();
    for (phase, violations) in [(1u8, &report.phase1_removed), (2u8, &report.phase2_removed)] {
        for violation in violations {
            let record = ReportRecord::Violation { phase, violation: violation.clone() };
            out.push_str(&serde_json::to_string(&record).expect("record serializes"));
            out.push('\n');
        }
    }
    out.push_str(&serde_json::to_string(&ReportRecord::Summary(summary.clone())).unwrap());
    out.push('\n');
    if let Some(m) = metrics {
        out.push_str(&serde_json::to_string(&ReportRecord::Metrics(m.clone())).unwrap());
        out.push('\n');
    }
    out
}

pub struct ParsedReport {
    pub violations: Vec<(u8, Violation)>,
    pub summary: ReportSummary,
    pub metrics: Option<MetricsRecord>,
}

pub fn parse_report(path: &Path, text: &str) -> Result<ParsedReport, ArtifactError> {
    let mut violations = Vec::new();
    let mut summary = None;
    let mut metrics = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ReportRecord = serde_json::from_str(line)
            .map_err(|e| bad(path, format!("line {}: {e}", lineno + 1)))?;
        match record {
            ReportRecord::Violation { phase, violation } => violations.push((phase, violation)),
            ReportRecord::Summary(s) => summary = Some(s),
            ReportRecord::Metrics(m) => metrics = Some(m),
        }
    }
    let summary = summary.ok_or_else(|| bad(path, "no summary record"))?;
    Ok(ParsedReport { violations, summary, metrics })
}

pub fn load_report(path: &Path) -> Result<ParsedReport, ArtifactError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_report(path, &text)
}

// ---------------------------------------------------------------------------
// Price table file
// ---------------------------------------------------------------------------

pub fn load_price_table(path: &Path) -> Result<PriceTable, ArtifactError> {
    read_json(path)
}
