//! Stage 2: ontology-guided extraction over segments.
//!
//! Each segment is an independent work item: build the prompt, request one
//! completion, parse, attach provenance, run the quality check. Segments fan
//! out across a bounded worker pool but results are always collected in
//! input order, so a run is deterministic for any parallelism level.

pub mod parse;
pub mod prompt;

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{CompletionBackend, CompletionRequest, LlmParams, TokenUsage};
use crate::graph::{Entity, Provenance, Relationship};
use crate::ontology::{EntityKind, OntologySchema};
use crate::segmenter::{Segment, SegmentedDocument};

pub use parse::{parse_extraction_json, ParseFailure, ParsedExtraction};
pub use prompt::{build_prompt, ExtractionMode, PromptError, PromptTemplates, COMPONENT_HEADERS};

/// Everything extracted from one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub segment_id: String,
    pub entities: Vec<Entity>,
    pub relationships: Vec<Relationship>,
    #[serde(default)]
    pub quality_flags: Vec<String>,
    pub token_usage: TokenUsage,
}

/// A segment the pipeline could not extract; tokens spent on the attempts
/// are still accounted for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFailure {
    pub segment_id: String,
    pub error: String,
    pub token_usage: TokenUsage,
}

/// Stage 2 output for a whole document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentExtraction {
    pub doc_id: String,
    pub doc_title: String,
    pub mode: ExtractionMode,
    pub model: String,
    pub results: Vec<ExtractionResult>,
    #[serde(default)]
    pub failures: Vec<SegmentFailure>,
    pub token_usage: TokenUsage,
}

impl DocumentExtraction {
    pub fn entity_count(&self) -> u64 {
        self.results.iter().map(|r| r.entities.len() as u64).sum()
    }

    pub fn relationship_count(&self) -> u64 {
        self.results.iter().map(|r| r.relationships.len() as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionOptions {
    pub mode: ExtractionMode,
    pub llm: LlmParams,
    pub parallelism: usize,
    pub templates: PromptTemplates,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        ExtractionOptions {
            mode: ExtractionMode::Ontology,
            llm: LlmParams::default(),
            parallelism: 1,
            templates: PromptTemplates::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("all {0} segments failed extraction")]
    AllSegmentsFailed(usize),
    #[error("document has no segments")]
    NoSegments,
}

/// Runs items through `f` on up to `workers` threads, returning outputs in
/// input order regardless of completion order.
pub(crate) fn ordered_parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = workers.max(1).min(n);
    if workers == 1 {
        return items.iter().enumerate().map(|(i, item)| f(i, item)).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, R)>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i, &items[i]);
                if tx.send((i, out)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut slots: Vec<Option<R>> = (0..n).map(|_| None).collect();
        for (i, out) in rx {
            slots[i] = Some(out);
        }
        slots.into_iter().map(|s| s.expect("worker produced every slot")).collect()
    })
}

/// Attaches the segment's provenance to every parsed element. The quote is
/// harvested from the payload's `source` object when the backend supplied
/// one; offsets stay verbatim in the entity properties and are never
/// recomputed.
fn attach_provenance(parsed: &mut ParsedExtraction, doc_id: &str, segment: &Segment) {
    for entity in &mut parsed.entities {
        let quote = entity
            .properties
            .get("source")
            .and_then(|s| s.get("quote"))
            .and_then(|q| q.as_str())
            .filter(|q| !q.trim().is_empty())
            .map(str::to_string);
        entity.provenance = vec![Provenance {
            doc_id: doc_id.to_string(),
            segment_id: segment.id.clone(),
            segment_title: segment.title.clone(),
            page_range: segment.page_range,
            quote,
        }];
    }
    for rel in &mut parsed.relationships {
        rel.provenance = vec![Provenance {
            doc_id: doc_id.to_string(),
            segment_id: segment.id.clone(),
            segment_title: segment.title.clone(),
            page_range: segment.page_range,
            quote: None,
        }];
    }
}

/// Prefix on cross-segment reference flags; the document pass recomputes
/// exactly these once prior segments are known.
pub const XREF_FLAG_PREFIX: &str = "unresolved reference:";

/// Per-segment quality check: warnings only, never rejection; filtering is
/// validation's job. `prior_ids` holds entity ids seen in earlier segments
/// so cross-segment references are not flagged.
pub fn quality_check(
    result: &ExtractionResult,
    schema: &OntologySchema,
    prior_ids: &HashSet<String>,
) -> Vec<String> {
    let mut warnings = Vec::new();
    if result.entities.is_empty() {
        warnings.push(format!("segment {} produced zero entities", result.segment_id));
    }
    let mut local_ids: HashSet<&str> = HashSet::new();
    for entity in &result.entities {
        local_ids.insert(entity.id.as_str());
        match entity.kind.known() {
            None => warnings.push(format!(
                "entity {} has unknown kind \"{}\"",
                entity.id,
                entity.kind.as_str()
            )),
            Some(kind) => {
                for field in schema.required_fields(kind).required {
                    if !entity.required_field_nonempty(field) {
                        warnings.push(format!(
                            "entity {} ({kind}) is missing required field {field}",
                            entity.id
                        ));
                    }
                }
                if kind == EntityKind::Metric && entity.metric_subtype.is_none() {
                    if let Some(raw) = entity.property("metric_type").and_then(|v| v.as_str()) {
                        if !raw.trim().is_empty() {
                            warnings.push(format!(
                                "entity {} declares unknown metric_type \"{raw}\"",
                                entity.id
                            ));
                        }
                    }
                }
            }
        }
    }
    for rel in &result.relationships {
        for endpoint in [&rel.subject, &rel.object] {
            if !local_ids.contains(endpoint.as_str()) && !prior_ids.contains(endpoint.as_str()) {
                warnings.push(format!(
                    "{XREF_FLAG_PREFIX} {} references id {endpoint} not defined in this or any prior segment",
                    rel.key()
                ));
            }
        }
    }
    warnings
}

/// Extracts one segment: one completion request, one re-request if the
/// response stays unparseable after the automated repair. Token usage is
/// recorded even when the segment fails.
pub fn extract_segment(
    doc_id: &str,
    doc_title: &str,
    segment: &Segment,
    backend: &dyn CompletionBackend,
    schema: &OntologySchema,
    options: &ExtractionOptions,
) -> Result<ExtractionResult, SegmentFailure> {
    let mut usage = TokenUsage::default();
    let fail = |error: String, usage: TokenUsage| SegmentFailure {
        segment_id: segment.id.clone(),
        error,
        token_usage: usage,
    };

    let prompt = match build_prompt(segment, doc_title, schema, options.mode, &options.templates) {
        Ok(p) => p,
        Err(e) => return Err(fail(e.to_string(), usage)),
    };
    let request = CompletionRequest::new(prompt, &options.llm);

    let mut parsed = None;
    let mut last_error = String::new();
    for _attempt in 0..2 {
        let response = match backend.complete(&request) {
            Ok(r) => r,
            Err(e) => return Err(fail(format!("backend error: {e}"), usage)),
        };
        usage.add(response.usage());
        match parse_extraction_json(&response.body) {
            Ok(p) => {
                parsed = Some(p);
                break;
            }
            Err(e) => last_error = e.to_string(),
        }
    }
    let mut parsed = match parsed {
        Some(p) => p,
        None => return Err(fail(format!("parse failure after retry: {last_error}"), usage)),
    };

    attach_provenance(&mut parsed, doc_id, segment);
    let mut result = ExtractionResult {
        segment_id: segment.id.clone(),
        entities: parsed.entities,
        relationships: parsed.relationships,
        quality_flags: parsed.warnings,
        token_usage: usage,
    };
    let flags = quality_check(&result, schema, &HashSet::new());
    result.quality_flags.extend(flags);
    Ok(result)
}

/// Extracts every segment of a document. Results come back in segment order
/// whatever the parallelism; quality flags that depend on prior segments are
/// recomputed in a deterministic ordered pass afterwards. Fails only when
/// every segment fails.
pub fn extract_document(
    doc: &SegmentedDocument,
    backend: &dyn CompletionBackend,
    schema: &OntologySchema,
    options: &ExtractionOptions,
) -> Result<DocumentExtraction, ExtractError> {
    if doc.segments.is_empty() {
        return Err(ExtractError::NoSegments);
    }
    let outcomes = ordered_parallel_map(&doc.segments, options.parallelism, |_, segment| {
        extract_segment(&doc.doc_id, &doc.title, segment, backend, schema, options)
    });

    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut total_usage = TokenUsage::default();
    let mut prior_ids: HashSet<String> = HashSet::new();
    for outcome in outcomes {
        match outcome {
            Ok(mut result) => {
                total_usage.add(result.token_usage);
                result.quality_flags = {
                    let mut flags: Vec<String> = result
                        .quality_flags
                        .iter()
                        .filter(|f| !f.starts_with(XREF_FLAG_PREFIX))
                        .cloned()
                        .collect();
                    flags.extend(
                        quality_check(&result, schema, &prior_ids)
                            .into_iter()
                            .filter(|f| f.starts_with(XREF_FLAG_PREFIX)),
                    );
                    flags
                };
                prior_ids.extend(result.entities.iter().map(|e| e.id.clone()));
                results.push(result);
            }
            Err(failure) => {
                total_usage.add(failure.token_usage);
                failures.push(failure);
            }
        }
    }
    if results.is_empty() {
        return Err(ExtractError::AllSegmentsFailed(failures.len()));
    }
    Ok(DocumentExtraction {
        doc_id: doc.doc_id.clone(),
        doc_title: doc.title.clone(),
        mode: options.mode,
        model: options.llm.model.clone(),
        results,
        failures,
        token_usage: total_usage,
    })
}
