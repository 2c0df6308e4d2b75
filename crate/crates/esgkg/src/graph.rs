//! Knowledge-graph element types shared by extraction, consolidation and
//! validation: entities, relationships, provenance, and the graph container.
//!
//! Entities are held in an ordered list rather than a map so that duplicate
//! ids remain representable; id uniqueness is an invariant of the
//! consolidated stage, checked by [`KnowledgeGraph::check_invariants`], not
//! something the container enforces silently.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{EntityKind, MetricSubtype, Predicate};

/// Traceable link from a graph element back to its source segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub segment_id: String,
    pub segment_title: String,
    /// Inclusive page span, serialized as `[start, end]`.
    pub page_range: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quote: Option<String>,
}

/// Entity kind as declared by the extraction output. Unknown kinds are
/// preserved verbatim so that validation can reject them explicitly instead
/// of the parser silently dropping data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum DeclaredKind {
    Known(EntityKind),
    Unknown(String),
}

impl DeclaredKind {
    pub fn parse(s: &str) -> DeclaredKind {
        match EntityKind::parse(s) {
            Some(k) => DeclaredKind::Known(k),
            None => DeclaredKind::Unknown(s.to_string()),
        }
    }

    pub fn known(&self) -> Option<EntityKind> {
        match self {
            DeclaredKind::Known(k) => Some(*k),
            DeclaredKind::Unknown(_) => None,
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            DeclaredKind::Known(k) => k.as_str(),
            DeclaredKind::Unknown(s) => s,
        }
    }
}

impl From<String> for DeclaredKind {
    fn from(s: String) -> Self {
        DeclaredKind::parse(&s)
    }
}

impl From<DeclaredKind> for String {
    fn from(k: DeclaredKind) -> String {
        k.as_str().to_string()
    }
}

impl std::fmt::Display for DeclaredKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Predicate as declared by the extraction output; unknown names survive to
/// the predicate-validity rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum DeclaredPredicate {
    Known(Predicate),
    Unknown(String),
}

impl DeclaredPredicate {
    pub fn parse(s: &str) -> DeclaredPredicate {
        match Predicate::parse(s) {
            Some(p) => DeclaredPredicate::Known(p),
            None => DeclaredPredicate::Unknown(s.to_string()),
        }
    }

    pub fn known(&self) -> Option<Predicate> {
        match self {
            DeclaredPredicate::Known(p) => Some(*p),
            DeclaredPredicate::Unknown(_) => None,
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            DeclaredPredicate::Known(p) => p.as_str(),
            DeclaredPredicate::Unknown(s) => s,
        }
    }
}

impl From<String> for DeclaredPredicate {
    fn from(s: String) -> Self {
        DeclaredPredicate::parse(&s)
    }
}

impl From<DeclaredPredicate> for String {
    fn from(p: DeclaredPredicate) -> String {
        p.as_str().to_string()
    }
}

impl std::fmt::Display for DeclaredPredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A semantically enriched graph entity.
///
/// `provenance` is a list: extraction attaches exactly one record, and
/// consolidation merges duplicates by concatenating the contributors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: DeclaredKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_subtype: Option<MetricSubtype>,
    pub label: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
}

/// True when a JSON value carries usable content: non-blank strings, arrays
/// with at least one non-empty element, any number or boolean.
pub fn value_is_nonempty(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => false,
        serde_json::Value::String(s) => !s.trim().is_empty(),
        serde_json::Value::Array(items) => items.iter().any(value_is_nonempty),
        serde_json::Value::Object(map) => !map.is_empty(),
        serde_json::Value::Number(_) | serde_json::Value::Bool(_) => true,
    }
}

impl Entity {
    pub fn property(&self, name: &str) -> Option<&serde_json::Value> {
        self.properties.get(name)
    }

    /// Presence of a required field, the entity-integrity reading: the
    /// extraction provided the field at all. `id`, `label` and
    /// `description` live in dedicated struct fields, where the only
    /// observable notion of presence is non-emptiness; `source` is carried
    /// by the provenance list; everything else is a properties key.
    pub fn required_field_present(&self, field: &str) -> bool {
        match field {
            "id" => !self.id.trim().is_empty(),
            "type" => true,
            "label" => !self.label.trim().is_empty(),
            "description" => !self.description.trim().is_empty(),
            "source" => !self.provenance.is_empty(),
            "metric_type" => {
                self.metric_subtype.is_some()
                    || self.properties.get("metric_type").map(|v| !v.is_null()).unwrap_or(false)
            }
            other => self.properties.get(other).map(|v| !v.is_null()).unwrap_or(false),
        }
    }

    /// Strict variant: the field is present and its value is non-empty.
    pub fn required_field_nonempty(&self, field: &str) -> bool {
        match field {
            "id" | "type" | "label" | "description" | "source" => {
                self.required_field_present(field)
            }
            "metric_type" => {
                self.metric_subtype.is_some()
                    || self.properties.get("metric_type").map(value_is_nonempty).unwrap_or(false)
            }
            other => self.properties.get(other).map(value_is_nonempty).unwrap_or(false),
        }
    }

    pub fn is_calculated_metric(&self) -> bool {
        self.kind.known() == Some(EntityKind::Metric)
            && self.metric_subtype == Some(MetricSubtype::CalculatedMetric)
    }
}

/// A subject–predicate–object triple with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relationship {
    pub subject: String,
    pub predicate: DeclaredPredicate,
    pub object: String,
    #[serde(default)]
    pub provenance: Vec<Provenance>,
}

impl Relationship {
    /// Stable identity used for deduplication, sorting and violation logs.
    pub fn key(&self) -> String {
        format!("{}|{}|{}", self.subject, self.predicate.as_str(), self.object)
    }
}

/// Pipeline stage a graph has reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Consolidated,
    Validated,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphInvariantError {
    #[error("duplicate entity id: {0}")]
    DuplicateId(String),
    #[error("relationship endpoint {endpoint} of {key} is not defined by any entity")]
    DanglingEndpoint { key: String, endpoint: String },
    #[error("self-loop relationship: {0}")]
    SelfLoop(String),
}

/// The knowledge graph at any stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeGraph {
    pub stage: Stage,
    pub entities: Vec<Entity>,
    pub relationships: Vec<Relationship>,
}

impl KnowledgeGraph {
    pub fn new(stage: Stage) -> Self {
        KnowledgeGraph { stage, entities: Vec::new(), relationships: Vec::new() }
    }

    /// First entity with the given id, if any.
    pub fn entity_by_id(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// Map from id to first occurrence, for endpoint lookups.
    pub fn entity_index(&self) -> BTreeMap<&str, &Entity> {
        let mut index = BTreeMap::new();
        for e in &self.entities {
            index.entry(e.id.as_str()).or_insert(e);
        }
        index
    }

    pub fn entity_count(&self) -> u64 {
        self.entities.len() as u64
    }

    pub fn relationship_count(&self) -> u64 {
        self.relationships.len() as u64
    }

    /// Checks unique ids, closed endpoints and absence of self-loops.
    pub fn check_invariants(&self) -> Result<(), GraphInvariantError> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.entities {
            if !seen.insert(e.id.as_str()) {
                return Err(GraphInvariantError::DuplicateId(e.id.clone()));
            }
        }
        for r in &self.relationships {
            if r.subject == r.object {
                return Err(GraphInvariantError::SelfLoop(r.key()));
            }
            for endpoint in [&r.subject, &r.object] {
                if !seen.contains(endpoint.as_str()) {
                    return Err(GraphInvariantError::DanglingEndpoint {
                        key: r.key(),
                        endpoint: endpoint.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Sorts entities by id (stable, preserving duplicate order) and
    /// relationships by key, for reproducible serialization.
    pub fn sort_canonical(&mut self) {
        self.entities.sort_by(|a, b| a.id.cmp(&b.id));
        self.relationships.sort_by_key(Relationship::key);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance {
            doc_id: "doc".into(),
            segment_id: "seg_01".into(),
            segment_title: "Intro".into(),
            page_range: (3, 5),
            quote: None,
        }
    }

    fn entity(id: &str, kind: &str) -> Entity {
        Entity {
            id: id.into(),
            kind: DeclaredKind::parse(kind),
            metric_subtype: None,
            label: format!("label {id}"),
            description: String::new(),
            properties: BTreeMap::new(),
            provenance: vec![prov()],
        }
    }

    #[test]
    fn declared_kind_preserves_unknown_names() {
        assert_eq!(DeclaredKind::parse("Metric"), DeclaredKind::Known(EntityKind::Metric));
        let unknown = DeclaredKind::parse("Standard");
        assert_eq!(unknown, DeclaredKind::Unknown("Standard".into()));
        let json = serde_json::to_string(&unknown).unwrap();
        assert_eq!(json, "\"Standard\"");
        let back: DeclaredKind = serde_json::from_str(&json).unwrap();
        assert_eq!(back, unknown);
    }

    #[test]
    fn invariant_check_catches_duplicates_and_dangling_endpoints() {
        let mut g = KnowledgeGraph::new(Stage::Consolidated);
        g.entities.push(entity("a", "Metric"));
        g.entities.push(entity("a", "Metric"));
        assert!(matches!(g.check_invariants(), Err(GraphInvariantError::DuplicateId(_))));

        let mut g = KnowledgeGraph::new(Stage::Consolidated);
        g.entities.push(entity("a", "Metric"));
        g.relationships.push(Relationship {
            subject: "a".into(),
            predicate: DeclaredPredicate::parse("ConsistOf"),
            object: "missing".into(),
            provenance: vec![prov()],
        });
        assert!(matches!(
            g.check_invariants(),
            Err(GraphInvariantError::DanglingEndpoint { .. })
        ));
    }

    #[test]
    fn field_presence_distinguishes_absent_from_empty() {
        let mut e = entity("m1", "Metric");
        e.properties.insert("unit".into(), serde_json::json!(""));
        assert!(e.required_field_present("unit"));
        assert!(!e.required_field_nonempty("unit"));
        assert!(!e.required_field_present("code"));
        assert!(!e.required_field_nonempty("code"));
        e.properties.insert("input_variables".into(), serde_json::json!(["", "x"]));
        assert!(e.required_field_nonempty("input_variables"));
    }
}
