//! Parsing of extraction responses into graph elements.
//!
//! The parser is strict about shape but tolerant of the two wrappers models
//! actually produce: a fenced code block around the payload, and truncation.
//! A truncated payload gets one repair attempt (trim back to the last
//! complete JSON value and close the open containers) before the response
//! is declared unparseable.

use std::collections::BTreeMap;

use serde_json::Value;
use thiserror::Error;

use crate::graph::{DeclaredKind, DeclaredPredicate, Entity, Relationship};
use crate::ontology::MetricSubtype;

#[derive(Debug, Error)]
pub enum ParseFailure {
    #[error("response is not valid JSON after repair: {0}")]
    InvalidJson(String),
    #[error("response JSON is not an object")]
    NotAnObject,
}

/// Parse output: elements still lack pipeline provenance (attached by the
/// extraction step); any `source` object from the payload is kept verbatim
/// in entity properties.
#[derive(Debug, Clone, Default)]
pub struct ParsedExtraction {
    pub entities: Vec<Entity>,
    pub relationships: Vec<Relationship>,
    pub meta: Value,
    pub warnings: Vec<String>,
}

/// Strips a surrounding Markdown code fence, if present.
fn strip_code_fence(body: &str) -> &str {
    let trimmed = body.trim();
    if !trimmed.starts_with("```") {
        return trimmed;
    }
    let after_fence = match trimmed.find('\n') {
        Some(pos) => &trimmed[pos + 1..],
        None => return trimmed,
    };
    match after_fence.rfind("```") {
        Some(end) => after_fence[..end].trim(),
        None => after_fence.trim(),
    }
}

/// Trims a truncated JSON document back to the last complete value and
/// closes whatever containers remain open. Leading prose before the first
/// bracket is dropped. Returns `None` when no prefix ends at a value
/// boundary.
fn repair_truncated(raw: &str) -> Option<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Frame {
        Object,
        Array,
    }
    let offset = raw.find(['{', '['])?;
    let body = &raw[offset..];
    let bytes = body.as_bytes();
    let mut stack: Vec<Frame> = Vec::new();
    let mut in_string = false;
    let mut escaped = false;
    // In an object, a string is a key until the ':' that follows it.
    let mut expecting_key = false;
    let mut last_good: Option<(usize, Vec<Frame>)> = None;

    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
                if !expecting_key {
                    last_good = Some((i + 1, stack.clone()));
                }
            }
            i += 1;
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => {
                stack.push(Frame::Object);
                expecting_key = true;
            }
            '[' => {
                stack.push(Frame::Array);
                expecting_key = false;
            }
            '}' | ']' => {
                stack.pop();
                expecting_key = false;
                last_good = Some((i + 1, stack.clone()));
                if stack.is_empty() {
                    break;
                }
            }
            ':' => expecting_key = false,
            ',' => {
                expecting_key = matches!(stack.last(), Some(Frame::Object));
            }
            c if c.is_ascii_digit() || c == '-' => {
                while i < bytes.len()
                    && matches!(bytes[i] as char, '0'..='9' | '-' | '+' | '.' | 'e' | 'E')
                {
                    i += 1;
                }
                // A number cut off by end-of-input may itself be truncated,
                // so only a delimited number counts as a complete value.
                if i < bytes.len() {
                    last_good = Some((i, stack.clone()));
                }
                continue;
            }
            't' | 'f' | 'n' => {
                let mut matched = false;
                for word in ["true", "false", "null"] {
                    if body[i..].starts_with(word) {
                        i += word.len();
                        last_good = Some((i, stack.clone()));
                        matched = true;
                        break;
                    }
                }
                if !matched {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        i += 1;
    }

    let (cut, open) = last_good?;
    let mut repaired = body[..cut].trim_end().trim_end_matches(',').to_string();
    for frame in open.iter().rev() {
        repaired.push(match frame {
            Frame::Object => '}',
            Frame::Array => ']',
        });
    }
    Some(repaired)
}

fn parse_value(body: &str) -> Result<Value, ParseFailure> {
    let stripped = strip_code_fence(body);
    match serde_json::from_str::<Value>(stripped) {
        Ok(v) => Ok(v),
        Err(first_err) => match repair_truncated(stripped) {
            Some(repaired) => serde_json::from_str::<Value>(&repaired)
                .map_err(|_| ParseFailure::InvalidJson(first_err.to_string())),
            None => Err(ParseFailure::InvalidJson(first_err.to_string())),
        },
    }
}

/// Fields with dedicated slots on [`Entity`]; everything else lands in the
/// properties map.
const DEDICATED_FIELDS: [&str; 4] = ["id", "type", "label", "description"];

fn entity_from_value(value: &Value, index: usize, warnings: &mut Vec<String>) -> Option<Entity> {
    let obj = match value.as_object() {
        Some(o) => o,
        None => {
            warnings.push(format!("entity #{index} is not an object; skipped"));
            return None;
        }
    };
    let id = obj.get("id").and_then(Value::as_str).unwrap_or("").trim().to_string();
    if id.is_empty() {
        warnings.push(format!("entity #{index} has no id; skipped"));
        return None;
    }
    let kind = DeclaredKind::parse(obj.get("type").and_then(Value::as_str).unwrap_or(""));
    let label = obj.get("label").and_then(Value::as_str).unwrap_or("").trim().to_string();
    let description =
        obj.get("description").and_then(Value::as_str).unwrap_or("").trim().to_string();

    let mut properties = BTreeMap::new();
    for (key, val) in obj {
        if DEDICATED_FIELDS.contains(&key.as_str()) {
            continue;
        }
        properties.insert(key.clone(), val.clone());
    }
    // Only Metric entities carry a subtype; anything else keeps the raw
    // property for the audit trail without a parsed tag.
    let metric_subtype = if kind == DeclaredKind::Known(crate::ontology::EntityKind::Metric) {
        properties.get("metric_type").and_then(Value::as_str).and_then(MetricSubtype::parse)
    } else {
        None
    };

    Some(Entity {
        id,
        kind,
        metric_subtype,
        label,
        description,
        properties,
        provenance: Vec::new(),
    })
}

fn relationship_from_value(
    value: &Value,
    index: usize,
    warnings: &mut Vec<String>,
) -> Option<Relationship> {
    let obj = value.as_object()?;
    let subject = obj.get("subject").and_then(Value::as_str).unwrap_or("").trim().to_string();
    let predicate = obj.get("predicate").and_then(Value::as_str).unwrap_or("").trim().to_string();
    let object = obj.get("object").and_then(Value::as_str).unwrap_or("").trim().to_string();
    if subject.is_empty() || predicate.is_empty() || object.is_empty() {
        warnings.push(format!("relationship #{index} is missing subject/predicate/object; skipped"));
        return None;
    }
    if subject == object {
        warnings.push(format!("relationship #{index} is a self-loop on {subject}; skipped"));
        return None;
    }
    Some(Relationship {
        subject,
        predicate: DeclaredPredicate::parse(&predicate),
        object,
        provenance: Vec::new(),
    })
}

/// Parses a completion body into entities and relationships. Unknown entity
/// kinds are preserved verbatim; missing optional fields default to empty.
pub fn parse_extraction_json(body: &str) -> Result<ParsedExtraction, ParseFailure> {
    let value = parse_value(body)?;
    let obj = value.as_object().ok_or(ParseFailure::NotAnObject)?;

    let mut parsed = ParsedExtraction {
        meta: obj.get("meta").cloned().unwrap_or(Value::Null),
        ..Default::default()
    };
    if let Some(items) = obj.get("entities").and_then(Value::as_array) {
        for (i, item) in items.iter().enumerate() {
            if let Some(entity) = entity_from_value(item, i, &mut parsed.warnings) {
                parsed.entities.push(entity);
            }
        }
    }
    if let Some(items) = obj.get("relationships").and_then(Value::as_array) {
        for (i, item) in items.iter().enumerate() {
            if let Some(rel) = relationship_from_value(item, i, &mut parsed.warnings) {
                parsed.relationships.push(rel);
            }
        }
    }
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::EntityKind;

    const WELL_FORMED: &str = r#"{
        "meta": {"doc_id": "doc"},
        "entities": [
            {"id": "metric_doc_3_01", "type": "Metric", "label": "Scope 1 emissions",
             "description": "Gross emissions.", "metric_type": "DirectMetric",
             "measurement_type": "Quantitative", "unit": "tCO2-e", "code": "EM-1",
             "source": {"doc_id": "doc", "page": 3, "quote": "gross emissions"}},
            {"id": "category_doc_3_01", "type": "Category", "label": "Emissions",
             "section_title": "Emissions"}
        ],
        "relationships": [
            {"subject": "category_doc_3_01", "predicate": "ConsistOf", "object": "metric_doc_3_01"}
        ]
    }"#;

    #[test]
    fn parses_well_formed_payload() {
        let parsed = parse_extraction_json(WELL_FORMED).unwrap();
        assert_eq!(parsed.entities.len(), 2);
        assert_eq!(parsed.relationships.len(), 1);
        assert!(parsed.warnings.is_empty());
        let metric = &parsed.entities[0];
        assert_eq!(metric.kind, DeclaredKind::Known(EntityKind::Metric));
        assert_eq!(metric.metric_subtype, Some(MetricSubtype::DirectMetric));
        assert_eq!(metric.properties["unit"], serde_json::json!("tCO2-e"));
        assert_eq!(metric.properties["source"]["quote"], serde_json::json!("gross emissions"));
        assert_eq!(parsed.meta["doc_id"], serde_json::json!("doc"));
    }

    #[test]
    fn fenced_payload_parses_like_unfenced() {
        let fenced = format!("```json\n{WELL_FORMED}\n```");
        let a = parse_extraction_json(WELL_FORMED).unwrap();
        let b = parse_extraction_json(&fenced).unwrap();
        assert_eq!(a.entities, b.entities);
        assert_eq!(a.relationships, b.relationships);
    }

    #[test]
    fn unknown_kinds_are_preserved_verbatim() {
        let body = r#"{"entities": [{"id": "x1", "type": "Standard", "label": "Some Standard"}],
                       "relationships": []}"#;
        let parsed = parse_extraction_json(body).unwrap();
        assert_eq!(parsed.entities[0].kind, DeclaredKind::Unknown("Standard".into()));
    }

    #[test]
    fn truncated_payload_repairs_to_last_complete_value() {
        let truncated = r#"{"entities": [{"id": "a1", "type": "Metric", "label": "One"},
                            {"id": "a2", "type": "Metric", "label": "Two"}, {"id": "a3", "ty"#;
        let parsed = parse_extraction_json(truncated).unwrap();
        // The cut lands after the value "a3"; the half-transmitted third
        // entity survives with whatever fields completed.
        assert_eq!(parsed.entities.len(), 3);
        assert_eq!(parsed.entities[1].id, "a2");
        assert_eq!(parsed.entities[2].id, "a3");
        assert_eq!(parsed.entities[2].label, "");
    }

    #[test]
    fn prose_wrapped_payload_recovers_the_json() {
        let body = format!("Here is the extraction:\n{WELL_FORMED}\nLet me know if it helps.");
        let parsed = parse_extraction_json(&body).unwrap();
        assert_eq!(parsed.entities.len(), 2);
    }

    #[test]
    fn hopeless_payload_fails_after_repair() {
        assert!(parse_extraction_json("not json at all").is_err());
        assert!(parse_extraction_json("{\"entities\": [{\"id").is_err());
    }

    #[test]
    fn self_loops_and_incomplete_triples_are_skipped_with_warnings() {
        let body = r#"{"entities": [], "relationships": [
            {"subject": "a", "predicate": "ConsistOf", "object": "a"},
            {"subject": "a", "predicate": "", "object": "b"},
            {"subject": "a", "predicate": "ConsistOf", "object": "b"}
        ]}"#;
        let parsed = parse_extraction_json(body).unwrap();
        assert_eq!(parsed.relationships.len(), 1);
        assert_eq!(parsed.warnings.len(), 2);
    }

    #[test]
    fn only_metrics_carry_a_parsed_subtype() {
        let body = r#"{"entities": [
            {"id": "c1", "type": "Category", "label": "Cat", "metric_type": "DirectMetric"},
            {"id": "m1", "type": "Metric", "label": "M", "metric_type": "DirectMetric"}
        ], "relationships": []}"#;
        let parsed = parse_extraction_json(body).unwrap();
        assert_eq!(parsed.entities[0].metric_subtype, None);
        assert!(parsed.entities[0].properties.contains_key("metric_type"));
        assert_eq!(parsed.entities[1].metric_subtype, Some(MetricSubtype::DirectMetric));
    }

    #[test]
    fn unknown_predicates_survive_parsing() {
        let body = r#"{"entities": [], "relationships": [
            {"subject": "a", "predicate": "RelatedTo", "object": "b"}
        ]}"#;
        let parsed = parse_extraction_json(body).unwrap();
        assert_eq!(
            parsed.relationships[0].predicate,
            DeclaredPredicate::Unknown("RelatedTo".into())
        );
    }
}
