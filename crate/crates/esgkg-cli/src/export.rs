//! Graph export formats.

use esgkg::artifact::GraphFile;
use esgkg::graph::KnowledgeGraph;

/// Line-oriented triple export: one statement per line, entity attributes
/// as quoted literals, deterministic ordering. Suitable for line-based
/// graph tooling and diffs.
pub fn to_triples(graph: &KnowledgeGraph) -> String {
    fn literal(value: &str) -> String {
        let mut out = String::with_capacity(value.len() + 2);
        out.push('"');
        for c in value.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\r' => out.push_str("\\r"),
                other => out.push(other),
            }
        }
        out.push('"');
        out
    }
    fn value_literal(value: &serde_json::Value) -> String {
        match value {
            serde_json::Value::String(s) => literal(s),
            other => literal(&other.to_string()),
        }
    }

    let mut entities: Vec<_> = graph.entities.iter().collect();
    entities.sort_by_key(|e| e.id.clone());
    let mut out = String::new();
    for entity in entities {
        out.push_str(&format!("<{}> <type> {} .\n", entity.id, literal(entity.kind.as_str())));
        if let Some(subtype) = entity.metric_subtype {
            out.push_str(&format!("<{}> <metric_type> {} .\n", entity.id, literal(subtype.as_str())));
        }
        out.push_str(&format!("<{}> <label> {} .\n", entity.id, literal(&entity.label)));
        if !entity.description.is_empty() {
            out.push_str(&format!(
                "<{}> <description> {} .\n",
                entity.id,
                literal(&entity.description)
            ));
        }
        for (key, value) in &entity.properties {
            if key == "source" || key == "metric_type" {
                continue;
            }
            out.push_str(&format!("<{}> <{}> {} .\n", entity.id, key, value_literal(value)));
        }
    }
    let mut relationships: Vec<_> = graph.relationships.iter().collect();
    relationships.sort_by_key(|r| r.key());
    for rel in relationships {
        out.push_str(&format!(
            "<{}> <{}> <{}> .\n",
            rel.subject,
            rel.predicate.as_str(),
            rel.object
        ));
    }
    out
}

/// Native export: the graph artifact re-serialized as-is (no header fields
/// are regenerated, so export/import round-trips byte for byte).
pub fn to_native(file: &GraphFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("graph file serializes");
    text.push('\n');
    text
}
