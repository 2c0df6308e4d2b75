//! The ESGMKG ontology registry.
//!
//! Five entity kinds, five predicates with exactly one legal subject/object
//! pattern each, seven structural rules, and the deterministic identifier
//! convention. The registry is compiled in as the single source of truth:
//! prompt construction and schema validation both render their constraint
//! text from the same tables here, so the two can never drift apart.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five ESGMKG entity kinds. No other kind is constructible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Industry,
    ReportingFramework,
    Category,
    Metric,
    Model,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Industry,
        EntityKind::ReportingFramework,
        EntityKind::Category,
        EntityKind::Metric,
        EntityKind::Model,
    ];

    pub fn parse(s: &str) -> Option<EntityKind> {
        match s {
            "Industry" => Some(EntityKind::Industry),
            "ReportingFramework" => Some(EntityKind::ReportingFramework),
            "Category" => Some(EntityKind::Category),
            "Metric" => Some(EntityKind::Metric),
            "Model" => Some(EntityKind::Model),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EntityKind::Industry => "Industry",
            EntityKind::ReportingFramework => "ReportingFramework",
            EntityKind::Category => "Category",
            EntityKind::Metric => "Metric",
            EntityKind::Model => "Model",
        }
    }

    /// Prefix used by the deterministic id convention.
    pub fn id_prefix(&self) -> &'static str {
        match self {
            EntityKind::Industry => "industry",
            EntityKind::ReportingFramework => "framework",
            EntityKind::Category => "category",
            EntityKind::Metric => "metric",
            EntityKind::Model => "model",
        }
    }

    /// One-line definition used in prompts and semantic type checks.
    pub fn definition(&self) -> &'static str {
        match self {
            EntityKind::Industry => {
                "An industry sector that reports ESG disclosures under a reporting framework \
                 (for example commercial banks or semiconductors)."
            }
            EntityKind::ReportingFramework => {
                "A disclosure standard or framework that defines ESG reporting requirements, \
                 such as an industry standard or a climate disclosure framework."
            }
            EntityKind::Category => {
                "A thematic disclosure topic within a reporting framework that groups related \
                 metrics, usually corresponding to a document section."
            }
            EntityKind::Metric => {
                "A specific ESG disclosure requirement with a measurement type, unit and code; \
                 it is directly reported, calculated from a formula, or used as a formula input."
            }
            EntityKind::Model => {
                "A calculation that produces a calculated metric, defined by an equation over \
                 named input variables."
            }
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Metric subtypes. Only entities of kind [`EntityKind::Metric`] carry one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricSubtype {
    DirectMetric,
    CalculatedMetric,
    InputMetric,
}

impl MetricSubtype {
    pub const ALL: [MetricSubtype; 3] = [
        MetricSubtype::DirectMetric,
        MetricSubtype::CalculatedMetric,
        MetricSubtype::InputMetric,
    ];

    pub fn parse(s: &str) -> Option<MetricSubtype> {
        match s {
            "DirectMetric" => Some(MetricSubtype::DirectMetric),
            "CalculatedMetric" => Some(MetricSubtype::CalculatedMetric),
            "InputMetric" => Some(MetricSubtype::InputMetric),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricSubtype::DirectMetric => "DirectMetric",
            MetricSubtype::CalculatedMetric => "CalculatedMetric",
            MetricSubtype::InputMetric => "InputMetric",
        }
    }
}

impl fmt::Display for MetricSubtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five ESGMKG predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Predicate {
    ReportUsing,
    Include,
    ConsistOf,
    IsCalculatedBy,
    RequiresInputFrom,
}

impl Predicate {
    pub const ALL: [Predicate; 5] = [
        Predicate::ReportUsing,
        Predicate::Include,
        Predicate::ConsistOf,
        Predicate::IsCalculatedBy,
        Predicate::RequiresInputFrom,
    ];

    pub fn parse(s: &str) -> Option<Predicate> {
        match s {
            "ReportUsing" => Some(Predicate::ReportUsing),
            "Include" => Some(Predicate::Include),
            "ConsistOf" => Some(Predicate::ConsistOf),
            "IsCalculatedBy" => Some(Predicate::IsCalculatedBy),
            "RequiresInputFrom" => Some(Predicate::RequiresInputFrom),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Predicate::ReportUsing => "ReportUsing",
            Predicate::Include => "Include",
            Predicate::ConsistOf => "ConsistOf",
            Predicate::IsCalculatedBy => "IsCalculatedBy",
            Predicate::RequiresInputFrom => "RequiresInputFrom",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the connection map: the single legal subject/object pattern
/// for a predicate. A `None` subtype on a Metric endpoint means any subtype
/// is acceptable there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PredicateSpec {
    pub predicate: Predicate,
    pub subject_kind: EntityKind,
    pub subject_subtype: Option<MetricSubtype>,
    pub object_kind: EntityKind,
    pub object_subtype: Option<MetricSubtype>,
}

impl PredicateSpec {
    /// Endpoint display name: the subtype name when the pattern pins one,
    /// otherwise the kind name (`CalculatedMetric → IsCalculatedBy → Model`).
    fn endpoint_name(kind: EntityKind, subtype: Option<MetricSubtype>) -> &'static str {
        match subtype {
            Some(st) => st.as_str(),
            None => kind.as_str(),
        }
    }

    /// Renders the pattern as a connection-map line.
    pub fn as_line(&self) -> String {
        format!(
            "{} → {} → {}",
            Self::endpoint_name(self.subject_kind, self.subject_subtype),
            self.predicate,
            Self::endpoint_name(self.object_kind, self.object_subtype),
        )
    }
}

const CONNECTION_MAP: [PredicateSpec; 5] = [
    PredicateSpec {
        predicate: Predicate::ReportUsing,
        subject_kind: EntityKind::Industry,
        subject_subtype: None,
        object_kind: EntityKind::ReportingFramework,
        object_subtype: None,
    },
    PredicateSpec {
        predicate: Predicate::Include,
        subject_kind: EntityKind::ReportingFramework,
        subject_subtype: None,
        object_kind: EntityKind::Category,
        object_subtype: None,
    },
    PredicateSpec {
        predicate: Predicate::ConsistOf,
        subject_kind: EntityKind::Category,
        subject_subtype: None,
        object_kind: EntityKind::Metric,
        object_subtype: None,
    },
    PredicateSpec {
        predicate: Predicate::IsCalculatedBy,
        subject_kind: EntityKind::Metric,
        subject_subtype: Some(MetricSubtype::CalculatedMetric),
        object_kind: EntityKind::Model,
        object_subtype: None,
    },
    PredicateSpec {
        predicate: Predicate::RequiresInputFrom,
        subject_kind: EntityKind::Model,
        subject_subtype: None,
        object_kind: EntityKind::Metric,
        object_subtype: Some(MetricSubtype::InputMetric),
    },
];

/// One of the seven structural rules embedded in extraction prompts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralRule {
    pub index: u8,
    pub checker_id: &'static str,
    pub description: &'static str,
}

const STRUCTURAL_RULES: [StructuralRule; 7] = [
    StructuralRule {
        index: 1,
        checker_id: "industry_single_framework",
        description: "Each Industry uses exactly one ReportingFramework.",
    },
    StructuralRule {
        index: 2,
        checker_id: "framework_has_categories",
        description: "Each ReportingFramework includes one or more Categories.",
    },
    StructuralRule {
        index: 3,
        checker_id: "metric_single_category",
        description: "Each Category contains one or more Metrics; a Metric belongs to exactly \
                      one Category.",
    },
    StructuralRule {
        index: 4,
        checker_id: "calculated_metric_model_link",
        description: "Each CalculatedMetric has exactly one IsCalculatedBy link to a Model; \
                      DirectMetric and InputMetric must not have IsCalculatedBy links.",
    },
    StructuralRule {
        index: 5,
        checker_id: "model_has_inputs",
        description: "Each Model has one or more InputMetrics linked by RequiresInputFrom.",
    },
    StructuralRule {
        index: 6,
        checker_id: "quantitative_unit",
        description: "Quantitative metrics must specify a unit.",
    },
    StructuralRule {
        index: 7,
        checker_id: "no_orphans",
        description: "No Category, Metric, or Model may be orphaned (each must participate in \
                      at least one valid edge).",
    },
];

/// A required or optional field on an entity kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    pub entity_kind: EntityKind,
    pub field_name: &'static str,
    pub required: bool,
    /// Value-domain annotation rendered into entity definitions, if any.
    pub note: Option<&'static str>,
}

/// Fields shared by every kind.
pub const SHARED_REQUIRED_FIELDS: [&str; 4] = ["id", "type", "label", "source"];

const FIELD_SPECS: &[FieldSpec] = &[
    FieldSpec { entity_kind: EntityKind::Industry, field_name: "sector", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::Industry, field_name: "country", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::Industry, field_name: "standard_reference", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::ReportingFramework, field_name: "name", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::ReportingFramework, field_name: "version", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::ReportingFramework, field_name: "year", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::ReportingFramework, field_name: "publisher", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::Category, field_name: "section_title", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::Category, field_name: "section_id", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::Category, field_name: "page_range", required: false, note: None },
    FieldSpec { entity_kind: EntityKind::Metric, field_name: "measurement_type", required: true, note: Some("one of {Quantitative, Qualitative}") },
    FieldSpec { entity_kind: EntityKind::Metric, field_name: "metric_type", required: true, note: Some("one of {DirectMetric, CalculatedMetric, InputMetric}") },
    FieldSpec { entity_kind: EntityKind::Metric, field_name: "unit", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::Metric, field_name: "code", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::Metric, field_name: "description", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::Metric, field_name: "disaggregations", required: false, note: Some("list") },
    FieldSpec { entity_kind: EntityKind::Model, field_name: "description", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::Model, field_name: "equation", required: true, note: None },
    FieldSpec { entity_kind: EntityKind::Model, field_name: "input_variables", required: true, note: Some("list") },
];

/// Required and optional field names for one entity kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KindFields {
    pub required: Vec<&'static str>,
    pub optional: Vec<&'static str>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdError {
    #[error("document slug must be non-empty")]
    EmptySlug,
    #[error("page must be >= 1")]
    InvalidPage,
    #[error("ordinal must be >= 1")]
    InvalidOrdinal,
}

/// Handle to the compiled-in ESGMKG registry.
#[derive(Debug, Clone, Copy, Default)]
pub struct OntologySchema;

impl OntologySchema {
    pub fn esgmkg() -> OntologySchema {
        OntologySchema
    }

    pub fn kinds(&self) -> &'static [EntityKind; 5] {
        &EntityKind::ALL
    }

    pub fn predicates(&self) -> &'static [Predicate; 5] {
        &Predicate::ALL
    }

    pub fn connection_map(&self) -> &'static [PredicateSpec; 5] {
        &CONNECTION_MAP
    }

    pub fn structural_rules(&self) -> &'static [StructuralRule; 7] {
        &STRUCTURAL_RULES
    }

    pub fn field_specs(&self) -> &'static [FieldSpec] {
        FIELD_SPECS
    }

    pub fn spec_for(&self, predicate: Predicate) -> &'static PredicateSpec {
        CONNECTION_MAP
            .iter()
            .find(|s| s.predicate == predicate)
            .expect("every predicate has a connection-map row")
    }

    /// True iff the triple pattern appears in the five-row connection map,
    /// including the Metric subtype constraints. Total: never errors.
    pub fn predicate_is_legal(
        &self,
        subject_kind: EntityKind,
        subject_subtype: Option<MetricSubtype>,
        predicate: Predicate,
        object_kind: EntityKind,
        object_subtype: Option<MetricSubtype>,
    ) -> bool {
        let spec = self.spec_for(predicate);
        if spec.subject_kind != subject_kind || spec.object_kind != object_kind {
            return false;
        }
        if let Some(st) = spec.subject_subtype {
            if subject_subtype != Some(st) {
                return false;
            }
        }
        if let Some(st) = spec.object_subtype {
            if object_subtype != Some(st) {
                return false;
            }
        }
        true
    }

    /// Shared fields plus kind-specific required fields; optional fields
    /// are returned separately.
    pub fn required_fields(&self, kind: EntityKind) -> KindFields {
        let mut required: Vec<&'static str> = SHARED_REQUIRED_FIELDS.to_vec();
        let mut optional = Vec::new();
        for spec in FIELD_SPECS.iter().filter(|s| s.entity_kind == kind) {
            if spec.required {
                required.push(spec.field_name);
            } else {
                optional.push(spec.field_name);
            }
        }
        KindFields { required, optional }
    }

    /// Deterministic entity identifier: `<prefix>_<doc>_<page>_<nn>` with a
    /// zero-padded two-digit ordinal. Ordinals of 100 or more render with as
    /// many digits as they need.
    pub fn make_entity_id(
        &self,
        kind: EntityKind,
        doc_slug: &str,
        page: u32,
        ordinal: u32,
    ) -> Result<String, IdError> {
        if doc_slug.trim().is_empty() {
            return Err(IdError::EmptySlug);
        }
        if page < 1 {
            return Err(IdError::InvalidPage);
        }
        if ordinal < 1 {
            return Err(IdError::InvalidOrdinal);
        }
        Ok(format!("{}_{}_{}_{:02}", kind.id_prefix(), doc_slug, page, ordinal))
    }

    /// Connection map rendered as prompt/validator text, one pattern per line.
    pub fn connection_map_text(&self) -> String {
        CONNECTION_MAP
            .iter()
            .map(PredicateSpec::as_line)
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Entity definitions rendered as prompt text (shared fields plus the
    /// per-kind required and optional fields).
    pub fn entity_definitions_text(&self) -> String {
        let mut out = String::new();
        out.push_str("All entities share: id, type, label, source{doc_id, page, start, end, quote}.\n");
        for kind in EntityKind::ALL {
            let heading = match kind {
                EntityKind::Metric => "Metric (DirectMetric / CalculatedMetric / InputMetric)".to_string(),
                other => other.as_str().to_string(),
            };
            let mut fields: Vec<String> = Vec::new();
            for spec in FIELD_SPECS.iter().filter(|s| s.entity_kind == kind) {
                let mut f = spec.field_name.to_string();
                if let Some(note) = spec.note {
                    f.push_str(&format!(" ({note})"));
                }
                if !spec.required {
                    f.push_str(" (optional)");
                }
                fields.push(f);
            }
            let body = if fields.is_empty() {
                "shared fields only".to_string()
            } else {
                fields.join(", ")
            };
            out.push_str(&format!("\n{heading}: {body}."));
        }
        out
    }

    /// The seven structural rules rendered as numbered prompt text.
    pub fn relationship_rules_text(&self) -> String {
        STRUCTURAL_RULES
            .iter()
            .map(|r| format!("({}) {}", r.index, r.description))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// The deterministic id convention rendered as prompt text.
    pub fn id_conventions_text(&self) -> String {
        let prefixes = EntityKind::ALL
            .iter()
            .map(|k| format!("{} → {}_", k, k.id_prefix()))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "Assign deterministic ids of the form <prefix>_<doc>_<page>_<nn>, where <doc> is \
             the document slug, <page> the first page the entity appears on, and <nn> a \
             two-digit ordinal counted per kind and page.\nPrefixes: {prefixes}.\nExample: \
             metric_sasb_cb_12_03."
        )
    }

    /// Machine-readable emission of the whole registry, so external tools
    /// can consume exactly the schema the pipeline enforces.
    pub fn schema_document(&self) -> serde_json::Value {
        serde_json::json!({
            "entity_kinds": EntityKind::ALL
                .iter()
                .map(|k| serde_json::json!({
                    "name": k.as_str(),
                    "id_prefix": k.id_prefix(),
                    "definition": k.definition(),
                    "required_fields": self.required_fields(*k).required,
                    "optional_fields": self.required_fields(*k).optional,
                }))
                .collect::<Vec<_>>(),
            "metric_subtypes": MetricSubtype::ALL.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            "connection_map": CONNECTION_MAP.iter().map(|s| serde_json::json!({
                "subject": PredicateSpec::endpoint_name(s.subject_kind, s.subject_subtype),
                "predicate": s.predicate.as_str(),
                "object": PredicateSpec::endpoint_name(s.object_kind, s.object_subtype),
            })).collect::<Vec<_>>(),
            "structural_rules": STRUCTURAL_RULES.iter().map(|r| serde_json::json!({
                "index": r.index,
                "checker_id": r.checker_id,
                "description": r.description,
            })).collect::<Vec<_>>(),
        })
    }
}
