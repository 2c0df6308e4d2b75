//! Prompt construction for Stage 2.
//!
//! The ontology-guided prompt has nine components in a fixed order; every
//! ontology-derived piece of text is rendered from the registry rather than
//! written out here, so prompts and validators share one schema definition.
//! The baseline prompt is the minimal comparison template: output shape and
//! the raw text, no ontology vocabulary at all.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BASELINE_TEXT_MARKER, SEGMENT_END_MARKER, SEGMENT_START_MARKER};
use crate::ontology::OntologySchema;
use crate::segmenter::Segment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractionMode {
    Ontology,
    Baseline,
}

impl ExtractionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtractionMode::Ontology => "ontology",
            ExtractionMode::Baseline => "baseline",
        }
    }

    pub fn parse(s: &str) -> Option<ExtractionMode> {
        match s {
            "ontology" => Some(ExtractionMode::Ontology),
            "baseline" => Some(ExtractionMode::Baseline),
            _ => None,
        }
    }
}

/// Editable prompt material that is not derived from the registry. The
/// few-shot examples ship as a template file and can be replaced wholesale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplates {
    pub few_shot: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates { few_shot: include_str!("../../templates/few_shot.txt").to_string() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("segment {0} has empty content")]
    EmptySegment(String),
}

/// Headers of the nine ontology-prompt components, in emission order.
pub const COMPONENT_HEADERS: [&str; 9] = [
    "## 1. System context",
    "## 2. Ontology connection map",
    "## 3. Entity definitions",
    "## 4. Relationship rules",
    "## 5. ID conventions",
    "## 6. Extraction workflow",
    "## 7. Output JSON schema",
    "## 8. Few-shot examples",
    "## 9. Segment content",
];

fn workflow_text() -> String {
    "Step 1 — Context and category detection: identify the Industry and the \
     ReportingFramework in scope; extract Categories from section headings; add \
     Industry → ReportUsing → ReportingFramework and ReportingFramework → Include → Category \
     edges.\n\
     Step 2 — Metric identification: detect every metric in the segment; classify each as \
     DirectMetric (descriptive, no formula), CalculatedMetric (defined by a formula or \
     \"calculated from\" language) or InputMetric (a component variable of a formula); add \
     Category → ConsistOf → Metric edges.\n\
     Step 3 — Model identification: when a formula or calculation appears, create a Model \
     entity with its equation and input_variables; link CalculatedMetric → IsCalculatedBy → \
     Model and Model → RequiresInputFrom → InputMetric.\n\
     Step 4 — Self-check before answering: every CalculatedMetric has exactly one \
     IsCalculatedBy edge, every Model has at least one RequiresInputFrom edge, every \
     quantitative metric has a unit, and no entity is orphaned."
        .to_string()
}

fn output_schema_text() -> String {
    r#"Return exactly one JSON object with this shape and nothing else:
{
  "meta": {"doc_id": "...", "segment_id": "..."},
  "entities": [
    {"id": "...", "type": "Industry|ReportingFramework|Category|Metric|Model",
     "label": "...", "description": "...",
     "...": "kind-specific fields from the entity definitions",
     "source": {"doc_id": "...", "page": 1, "start": 0, "end": 0, "quote": "..."}}
  ],
  "relationships": [
    {"subject": "<entity id>", "predicate": "<predicate name>", "object": "<entity id>"}
  ]
}"#
    .to_string()
}

/// Builds the extraction prompt for one segment. A pure function of its
/// arguments: identical inputs yield byte-identical prompts.
pub fn build_prompt(
    segment: &Segment,
    doc_title: &str,
    schema: &OntologySchema,
    mode: ExtractionMode,
    templates: &PromptTemplates,
) -> Result<String, PromptError> {
    if segment.content.trim().is_empty() {
        return Err(PromptError::EmptySegment(segment.id.clone()));
    }
    match mode {
        ExtractionMode::Ontology => Ok(build_ontology_prompt(segment, doc_title, schema, templates)),
        ExtractionMode::Baseline => Ok(build_baseline_prompt(segment, doc_title)),
    }
}

fn build_ontology_prompt(
    segment: &Segment,
    doc_title: &str,
    schema: &OntologySchema,
    templates: &PromptTemplates,
) -> String {
    let mut sections: Vec<String> = Vec::with_capacity(9);

    sections.push(format!(
        "{}\n\nYou are an ESG Knowledge Graph Extractor.\nGoal: convert ESG regulatory text \
         (e.g. SASB, TCFD, IFRS S2) into ESGMKG-compliant JSON.\nFollow these rules:\n\
         - Obey the ESGMKG ontology.\n\
         - Use only information explicitly stated in the text.\n\
         - Preserve page- and segment-level provenance for every entity and relationship.\n\
         - Return JSON only, no natural-language explanations.",
        COMPONENT_HEADERS[0]
    ));

    sections.push(format!(
        "{}\n\nUse only the following patterns:\n\n{}\n\nDo not invent new predicates or \
         entities. Every entity must appear in at least one valid relationship (no orphans).",
        COMPONENT_HEADERS[1],
        schema.connection_map_text()
    ));

    sections.push(format!("{}\n\n{}", COMPONENT_HEADERS[2], schema.entity_definitions_text()));

    sections.push(format!("{}\n\n{}", COMPONENT_HEADERS[3], schema.relationship_rules_text()));

    sections.push(format!("{}\n\n{}", COMPONENT_HEADERS[4], schema.id_conventions_text()));

    sections.push(format!("{}\n\n{}", COMPONENT_HEADERS[5], workflow_text()));

    sections.push(format!("{}\n\n{}", COMPONENT_HEADERS[6], output_schema_text()));

    sections.push(format!("{}\n\n{}", COMPONENT_HEADERS[7], templates.few_shot.trim_end()));

    sections.push(format!(
        "{}\n\nDocument: {}\nSection: {} (pages {}-{})\n\n{}\n{}\n{}",
        COMPONENT_HEADERS[8],
        doc_title,
        segment_heading(segment),
        segment.page_range.0,
        segment.page_range.1,
        SEGMENT_START_MARKER,
        segment.content,
        SEGMENT_END_MARKER,
    ));

    sections.join("\n\n")
}

fn segment_heading(segment: &Segment) -> String {
    if segment.section_number.is_empty() {
        segment.title.clone()
    } else {
        format!("{} {}", segment.section_number, segment.title)
    }
}

fn build_baseline_prompt(segment: &Segment, doc_title: &str) -> String {
    format!(
        r#"Extract ESG metrics and related information from the document text below.

Return JSON with entities and relationships:

{{
  "entities": [
    {{"id": "...", "label": "...", "type": "...", "description": "...", "unit": "..."}}
  ],
  "relationships": [
    {{"subject": "...", "predicate": "...", "object": "..."}}
  ]
}}

Document: {doc_title}
Section: {section}

{BASELINE_TEXT_MARKER}
{content}"#,
        doc_title = doc_title,
        section = segment.title,
        content = segment.content,
    )
}
