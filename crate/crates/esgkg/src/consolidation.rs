//! Three-pass consolidation of per-segment extraction results into one
//! unified graph: id resolution, entity deduplication, relationship
//! deduplication.
//!
//! Matching is conservative: exact normalized labels, no fuzzy matching.
//! Every non-trivial decision (merge conflict, self-loop, dangling
//! endpoint) is logged rather than applied silently.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::extraction::ExtractionResult;
use crate::graph::{DeclaredKind, Entity, KnowledgeGraph, Relationship, Stage};
use crate::ontology::EntityKind;

/// Alias → canonical id map. Aliases point directly at canonicals; there are
/// no chains, so applying the map twice is the same as applying it once.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdResolutionMap {
    map: BTreeMap<String, String>,
}

impl IdResolutionMap {
    pub fn resolve<'a>(&'a self, id: &'a str) -> &'a str {
        self.map.get(id).map(String::as_str).unwrap_or(id)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.map.iter()
    }

    /// No alias maps to another alias.
    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|canonical| !self.map.contains_key(canonical))
    }
}

/// Case-folded, trimmed, inner whitespace collapsed.
pub fn normalize_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    let mut in_ws = false;
    for c in label.trim().chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
                in_ws = true;
            }
        } else {
            in_ws = false;
            out.extend(c.to_lowercase());
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

fn metric_code(entity: &Entity) -> Option<String> {
    entity
        .property("code")
        .and_then(|v| v.as_str())
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

/// Pass 1: computes which ids name the same entity. Two occurrences alias
/// when they share an id, or when they have the same kind and equal
/// normalized labels, for Metrics additionally requiring an equal,
/// non-empty code. The canonical id of each alias class is its
/// lexicographically smallest member.
pub fn resolve_ids(results: &[ExtractionResult]) -> IdResolutionMap {
    let entities: Vec<&Entity> =
        results.iter().flat_map(|r| r.entities.iter()).collect();
    let mut uf = UnionFind::new(entities.len());

    let mut by_id: HashMap<&str, usize> = HashMap::new();
    let mut by_label_key: HashMap<(String, String), usize> = HashMap::new();
    for (i, entity) in entities.iter().enumerate() {
        match by_id.entry(entity.id.as_str()) {
            std::collections::hash_map::Entry::Occupied(first) => uf.union(i, *first.get()),
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(i);
            }
        }
        let label = normalize_label(&entity.label);
        if label.is_empty() {
            continue;
        }
        let label_key = match &entity.kind {
            DeclaredKind::Known(EntityKind::Metric) => match metric_code(entity) {
                Some(code) => (format!("Metric\u{1}{code}"), label),
                None => continue,
            },
            other => (other.as_str().to_string(), label),
        };
        match by_label_key.entry(label_key) {
            std::collections::hash_map::Entry::Occupied(first) => uf.union(i, *first.get()),
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(i);
            }
        }
    }

    let mut class_ids: HashMap<usize, BTreeSet<&str>> = HashMap::new();
    for (i, entity) in entities.iter().enumerate() {
        class_ids.entry(uf.find(i)).or_default().insert(entity.id.as_str());
    }
    let mut map = BTreeMap::new();
    for ids in class_ids.values() {
        let canonical = ids.iter().next().expect("class is non-empty");
        for id in ids.iter().skip(1) {
            map.insert(id.to_string(), canonical.to_string());
        }
    }
    IdResolutionMap { map }
}

fn merge_warning(id: &str, field: &str, kept: &str, ignored: &str) -> String {
    format!("merge conflict on {id}.{field}: kept {kept:?}, ignored {ignored:?}")
}

fn merge_entity(into: &mut Entity, from: &Entity, warnings: &mut Vec<String>) {
    if into.kind != from.kind {
        warnings.push(merge_warning(&into.id, "type", into.kind.as_str(), from.kind.as_str()));
    }
    match (&into.metric_subtype, &from.metric_subtype) {
        (None, Some(st)) => into.metric_subtype = Some(*st),
        (Some(a), Some(b)) if a != b => {
            warnings.push(merge_warning(&into.id, "metric_type", a.as_str(), b.as_str()));
        }
        _ => {}
    }
    if into.label.trim().is_empty() {
        into.label = from.label.clone();
    } else if !from.label.trim().is_empty()
        && normalize_label(&into.label) != normalize_label(&from.label)
    {
        warnings.push(merge_warning(&into.id, "label", &into.label, &from.label));
    }
    if into.description.trim().is_empty() {
        into.description = from.description.clone();
    } else if !from.description.trim().is_empty() && into.description != from.description {
        warnings.push(merge_warning(&into.id, "description", &into.description, &from.description));
    }
    for (key, value) in &from.properties {
        match into.properties.get(key) {
            None => {
                into.properties.insert(key.clone(), value.clone());
            }
            Some(existing) if !crate::graph::value_is_nonempty(existing) => {
                if crate::graph::value_is_nonempty(value) {
                    into.properties.insert(key.clone(), value.clone());
                }
            }
            Some(existing) => {
                if crate::graph::value_is_nonempty(value) && existing != value && key != "source" {
                    warnings.push(merge_warning(
                        &into.id,
                        key,
                        &existing.to_string(),
                        &value.to_string(),
                    ));
                }
            }
        }
    }
    into.provenance.extend(from.provenance.iter().cloned());
}

/// Pass 2: one entity per canonical id. Merged entities take the union of
/// properties; conflicts prefer non-empty over empty, then the earlier
/// segment's value, with a warning. Provenance accumulates every
/// contributor.
pub fn dedupe_entities(
    results: &[ExtractionResult],
    map: &IdResolutionMap,
) -> (Vec<Entity>, Vec<String>) {
    let mut merged: BTreeMap<String, Entity> = BTreeMap::new();
    let mut warnings = Vec::new();
    for result in results {
        for entity in &result.entities {
            let canonical = map.resolve(&entity.id).to_string();
            match merged.get_mut(&canonical) {
                None => {
                    let mut first = entity.clone();
                    first.id = canonical.clone();
                    merged.insert(canonical, first);
                }
                Some(existing) => merge_entity(existing, entity, &mut warnings),
            }
        }
    }
    (merged.into_values().collect(), warnings)
}

/// Pass 3: rewrites endpoints to canonical ids and collapses exact-duplicate
/// triples, keeping all provenances. Self-loops created by aliasing are
/// dropped with a warning.
pub fn dedupe_relationships(
    results: &[ExtractionResult],
    map: &IdResolutionMap,
) -> (Vec<Relationship>, Vec<String>) {
    let mut merged: BTreeMap<String, Relationship> = BTreeMap::new();
    let mut warnings = Vec::new();
    for result in results {
        for rel in &result.relationships {
            let subject = map.resolve(&rel.subject).to_string();
            let object = map.resolve(&rel.object).to_string();
            if subject == object {
                warnings.push(format!(
                    "dropped self-loop {} created by id resolution",
                    rel.key()
                ));
                continue;
            }
            let rewritten = Relationship {
                subject,
                predicate: rel.predicate.clone(),
                object,
                provenance: rel.provenance.clone(),
            };
            match merged.get_mut(&rewritten.key()) {
                None => {
                    merged.insert(rewritten.key(), rewritten);
                }
                Some(existing) => existing.provenance.extend(rewritten.provenance),
            }
        }
    }
    (merged.into_values().collect(), warnings)
}

/// Log of what consolidation changed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConsolidationLog {
    pub resolution_map: IdResolutionMap,
    pub warnings: Vec<String>,
}

/// Runs the three passes in order and drops relationships whose endpoints
/// were never defined by any entity. Deterministic for a given input order.
pub fn consolidate(results: &[ExtractionResult]) -> (KnowledgeGraph, ConsolidationLog) {
    let map = resolve_ids(results);
    let (entities, mut warnings) = dedupe_entities(results, &map);
    let (relationships, rel_warnings) = dedupe_relationships(results, &map);
    warnings.extend(rel_warnings);

    let defined: BTreeSet<&str> = entities.iter().map(|e| e.id.as_str()).collect();
    let relationships = relationships
        .into_iter()
        .filter(|rel| {
            let keep = defined.contains(rel.subject.as_str()) && defined.contains(rel.object.as_str());
            if !keep {
                warnings.push(format!("dropped dangling relationship {}", rel.key()));
            }
            keep
        })
        .collect();

    let graph = KnowledgeGraph { stage: Stage::Consolidated, entities, relationships };
    (graph, ConsolidationLog { resolution_map: map, warnings })
}
