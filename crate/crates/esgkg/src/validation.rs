//! Stage 3: two-phase validation.
//!
//! Phase 1 asks the completion backend whether each entity's label and
//! description match its declared kind; entities with kinds outside the
//! ontology are rejected without spending a call. Phase 2 runs the six
//! rule-based validators VR001–VR006 against one snapshot, removes
//! violating elements, cascades relationship removals, and repeats on
//! anything the removals newly broke until the graph is a fixpoint.
//! Violations are logged, never repaired.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::backend::{CompletionBackend, CompletionRequest, LlmParams, TokenUsage};
use crate::extraction::ordered_parallel_map;
use crate::graph::{Entity, KnowledgeGraph, Provenance, Relationship, Stage};
use crate::ontology::{EntityKind, MetricSubtype, OntologySchema, Predicate};

/// Identifier of the check that produced a violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "SEM")]
    Sem,
    #[serde(rename = "VR001")]
    Vr001,
    #[serde(rename = "VR002")]
    Vr002,
    #[serde(rename = "VR003")]
    Vr003,
    #[serde(rename = "VR004")]
    Vr004,
    #[serde(rename = "VR005")]
    Vr005,
    #[serde(rename = "VR006")]
    Vr006,
}

impl RuleId {
    /// The six schema rules, in execution order.
    pub const SCHEMA_RULES: [RuleId; 6] = [
        RuleId::Vr001,
        RuleId::Vr002,
        RuleId::Vr003,
        RuleId::Vr004,
        RuleId::Vr005,
        RuleId::Vr006,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleId::Sem => "SEM",
            RuleId::Vr001 => "VR001",
            RuleId::Vr002 => "VR002",
            RuleId::Vr003 => "VR003",
            RuleId::Vr004 => "VR004",
            RuleId::Vr005 => "VR005",
            RuleId::Vr006 => "VR006",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Entity,
    Relationship,
}

/// One logged violation. Relationship targets are identified by their
/// `subject|predicate|object` key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule_id: RuleId,
    pub target_id: String,
    pub target_kind: TargetKind,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Passed/total items for one rule, counted against the Phase 2 snapshot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassCount {
    pub passed: u64,
    pub total: u64,
}

impl PassCount {
    pub fn violations(&self) -> u64 {
        self.total - self.passed
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub entities: u64,
    pub relationships: u64,
}

impl Counts {
    pub fn of(graph: &KnowledgeGraph) -> Counts {
        Counts { entities: graph.entity_count(), relationships: graph.relationship_count() }
    }
}

/// Full log of one validation run. Removal counts are tracked explicitly so
/// the accounting identity is testable even when one element violates
/// several rules: the violation lists are audit logs, the counts are the
/// distinct elements actually removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub input_counts: Counts,
    pub phase1_removed: Vec<Violation>,
    pub phase2_removed: Vec<Violation>,
    pub per_rule_pass: BTreeMap<String, PassCount>,
    pub phase1_removed_counts: Counts,
    pub phase2_removed_counts: Counts,
    pub output_counts: Counts,
    pub semantic_calls: u64,
    pub token_usage: TokenUsage,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ValidationReport {
    /// Input minus logged removals equals output, for both element kinds.
    pub fn accounting_holds(&self) -> bool {
        let entities_ok = self.input_counts.entities
            == self.output_counts.entities
                + self.phase1_removed_counts.entities
                + self.phase2_removed_counts.entities;
        let rels_ok = self.input_counts.relationships
            == self.output_counts.relationships
                + self.phase1_removed_counts.relationships
                + self.phase2_removed_counts.relationships;
        entities_ok && rels_ok
    }

    /// Entities that survived Phase 1, the numerator of semantic accuracy.
    pub fn semantically_correct_entities(&self) -> u64 {
        self.input_counts.entities - self.phase1_removed_counts.entities
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub llm: LlmParams,
    pub parallelism: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { llm: LlmParams::default(), parallelism: 1 }
    }
}

// ---------------------------------------------------------------------------
// Phase 1: semantic validation
// ---------------------------------------------------------------------------

/// Fixed prompt for one semantic type check. The kind definition comes from
/// the ontology registry; the verdict is requested as a one-field JSON
/// object.
pub fn semantic_check_prompt(entity: &Entity, kind: EntityKind) -> String {
    format!(
        "You are an ESG ontology type checker.\n\
         Task: decide whether the entity below genuinely is a {kind} under this definition.\n\
         Definition: {definition}\n\n\
         Entity id: {id}\n\
         Label: {label}\n\
         Description: {description}\n\n\
         Respond with JSON only: {{\"verdict\": \"yes\"}} or {{\"verdict\": \"no\"}}.",
        kind = kind.as_str(),
        definition = kind.definition(),
        id = entity.id,
        label = entity.label,
        description = entity.description,
    )
}

enum VerdictOutcome {
    Affirmed,
    Denied,
    Unreadable(String),
}

fn parse_verdict(body: &str) -> VerdictOutcome {
    let trimmed = body.trim();
    let word = serde_json::from_str::<serde_json::Value>(trimmed)
        .ok()
        .and_then(|v| v.get("verdict").and_then(|x| x.as_str()).map(str::to_string))
        .unwrap_or_else(|| {
            trimmed
                .split(|c: char| !c.is_ascii_alphanumeric())
                .find(|t| !t.is_empty())
                .unwrap_or("")
                .to_string()
        });
    match word.to_ascii_lowercase().as_str() {
        "yes" | "y" | "true" => VerdictOutcome::Affirmed,
        "no" | "n" | "false" => VerdictOutcome::Denied,
        _ => VerdictOutcome::Unreadable(body.to_string()),
    }
}

/// Result of Phase 1 over one graph snapshot.
pub struct SemanticOutcome {
    /// Keep flag per entity position in the input graph.
    pub keep: Vec<bool>,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
    pub token_usage: TokenUsage,
    pub calls: u64,
}

/// Phase 1. Entities with kinds outside the ontology are rejected without a
/// backend call; the rest are checked one at a time. Backend failures
/// retain the entity with a warning; a network fault must not destroy
/// data.
pub fn semantic_validate(
    graph: &KnowledgeGraph,
    backend: &dyn CompletionBackend,
    _schema: &OntologySchema,
    options: &ValidationOptions,
) -> SemanticOutcome {
    let mut keep = vec![true; graph.entities.len()];
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    let mut checkable: Vec<(usize, EntityKind)> = Vec::new();
    for (i, entity) in graph.entities.iter().enumerate() {
        match entity.kind.known() {
            Some(kind) => checkable.push((i, kind)),
            None => {
                keep[i] = false;
                violations.push(Violation {
                    rule_id: RuleId::Sem,
                    target_id: entity.id.clone(),
                    target_kind: TargetKind::Entity,
                    detail: format!(
                        "unknown entity kind {:?} rejected without a semantic check",
                        entity.kind.as_str()
                    ),
                    provenance: entity.provenance.first().cloned(),
                });
            }
        }
    }

    let responses = ordered_parallel_map(&checkable, options.parallelism, |_, &(i, kind)| {
        let prompt = semantic_check_prompt(&graph.entities[i], kind);
        let request = CompletionRequest::new(prompt, &options.llm);
        backend.complete(&request)
    });

    let mut usage = TokenUsage::default();
    let mut calls = 0u64;
    for (&(i, kind), response) in checkable.iter().zip(responses) {
        calls += 1;
        let entity = &graph.entities[i];
        match response {
            Ok(resp) => {
                usage.add(resp.usage());
                match parse_verdict(&resp.body) {
                    VerdictOutcome::Affirmed => {}
                    VerdictOutcome::Denied => {
                        keep[i] = false;
                        violations.push(Violation {
                            rule_id: RuleId::Sem,
                            target_id: entity.id.clone(),
                            target_kind: TargetKind::Entity,
                            detail: format!(
                                "semantic check negative: label/description do not match kind {kind}"
                            ),
                            provenance: entity.provenance.first().cloned(),
                        });
                    }
                    VerdictOutcome::Unreadable(body) => {
                        warnings.push(format!(
                            "entity {} retained: unreadable semantic verdict {body:?}",
                            entity.id
                        ));
                    }
                }
            }
            Err(e) => {
                warnings.push(format!(
                    "entity {} retained as unverifiable: backend error: {e}",
                    entity.id
                ));
            }
        }
    }

    SemanticOutcome { keep, violations, warnings, token_usage: usage, calls }
}

/// Removes every relationship whose subject or object is in `removed_ids`.
/// Nothing else changes. Returns the filtered graph and the removed edges.
pub fn cascade_filter(
    graph: &KnowledgeGraph,
    removed_ids: &BTreeSet<String>,
) -> (KnowledgeGraph, Vec<Relationship>) {
    let mut kept = KnowledgeGraph::new(graph.stage);
    kept.entities = graph.entities.clone();
    let mut removed = Vec::new();
    for rel in &graph.relationships {
        if removed_ids.contains(&rel.subject) || removed_ids.contains(&rel.object) {
            removed.push(rel.clone());
        } else {
            kept.relationships.push(rel.clone());
        }
    }
    (kept, removed)
}

// ---------------------------------------------------------------------------
// Phase 2: rule-based schema validation
// ---------------------------------------------------------------------------

/// Output of one rule over one snapshot. `passed` is always
/// `total - violations.len()`.
pub struct RuleOutcome {
    pub violations: Vec<Violation>,
    pub total: u64,
    /// Entity positions to remove (empty for relationship rules).
    pub entity_indices: Vec<usize>,
    /// Relationship positions to remove (VR005 only).
    pub relationship_indices: Vec<usize>,
}

impl RuleOutcome {
    pub fn passed(&self) -> u64 {
        self.total - self.violations.len() as u64
    }
}

fn entity_violation(rule: RuleId, entity: &Entity, detail: String) -> Violation {
    Violation {
        rule_id: rule,
        target_id: entity.id.clone(),
        target_kind: TargetKind::Entity,
        detail,
        provenance: entity.provenance.first().cloned(),
    }
}

fn vr001_id_uniqueness(graph: &KnowledgeGraph) -> RuleOutcome {
    let mut outcome = RuleOutcome {
        violations: Vec::new(),
        total: graph.entity_count(),
        entity_indices: Vec::new(),
        relationship_indices: Vec::new(),
    };
    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for (i, entity) in graph.entities.iter().enumerate() {
        match first_seen.entry(entity.id.as_str()) {
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(i);
            }
            std::collections::hash_map::Entry::Occupied(first) => {
                outcome.violations.push(entity_violation(
                    RuleId::Vr001,
                    entity,
                    format!("id collides with earlier entity at position {}", first.get()),
                ));
                outcome.entity_indices.push(i);
            }
        }
    }
    outcome
}

fn vr002_required_fields(graph: &KnowledgeGraph, schema: &OntologySchema) -> RuleOutcome {
    let mut outcome = RuleOutcome {
        violations: Vec::new(),
        total: graph.entity_count(),
        entity_indices: Vec::new(),
        relationship_indices: Vec::new(),
    };
    for (i, entity) in graph.entities.iter().enumerate() {
        let required: Vec<&'static str> = match entity.kind.known() {
            Some(kind) => schema.required_fields(kind).required,
            None => crate::ontology::SHARED_REQUIRED_FIELDS.to_vec(),
        };
        let missing: Vec<&str> =
            required.into_iter().filter(|f| !entity.required_field_present(f)).collect();
        if !missing.is_empty() {
            outcome.violations.push(entity_violation(
                RuleId::Vr002,
                entity,
                format!("missing required fields: {}", missing.join(", ")),
            ));
            outcome.entity_indices.push(i);
        }
    }
    outcome
}

fn vr003_metric_values(graph: &KnowledgeGraph) -> RuleOutcome {
    let mut outcome = RuleOutcome {
        violations: Vec::new(),
        total: 0,
        entity_indices: Vec::new(),
        relationship_indices: Vec::new(),
    };
    for (i, entity) in graph.entities.iter().enumerate() {
        if entity.kind.known() != Some(EntityKind::Metric) {
            continue;
        }
        outcome.total += 1;
        let mut empty = Vec::new();
        for field in ["code", "unit"] {
            if !entity.required_field_nonempty(field) {
                empty.push(field);
            }
        }
        if !empty.is_empty() {
            outcome.violations.push(entity_violation(
                RuleId::Vr003,
                entity,
                format!("metric {} must be non-empty", empty.join(" and ")),
            ));
            outcome.entity_indices.push(i);
        }
    }
    outcome
}

fn vr004_model_inputs(graph: &KnowledgeGraph) -> RuleOutcome {
    let mut outcome = RuleOutcome {
        violations: Vec::new(),
        total: 0,
        entity_indices: Vec::new(),
        relationship_indices: Vec::new(),
    };
    for (i, entity) in graph.entities.iter().enumerate() {
        if entity.kind.known() != Some(EntityKind::Model) {
            continue;
        }
        outcome.total += 1;
        if !entity.required_field_nonempty("input_variables") {
            outcome.violations.push(entity_violation(
                RuleId::Vr004,
                entity,
                "model has no valid input variable".to_string(),
            ));
            outcome.entity_indices.push(i);
        }
    }
    outcome
}

fn vr005_predicate_validity(graph: &KnowledgeGraph, schema: &OntologySchema) -> RuleOutcome {
    let mut outcome = RuleOutcome {
        violations: Vec::new(),
        total: graph.relationship_count(),
        entity_indices: Vec::new(),
        relationship_indices: Vec::new(),
    };
    let index = graph.entity_index();
    for (i, rel) in graph.relationships.iter().enumerate() {
        let flag = |detail: String| Violation {
            rule_id: RuleId::Vr005,
            target_id: rel.key(),
            target_kind: TargetKind::Relationship,
            detail,
            provenance: rel.provenance.first().cloned(),
        };
        let violation = match rel.predicate.known() {
            None => Some(flag(format!("predicate {:?} is not an ESGMKG predicate", rel.predicate.as_str()))),
            Some(predicate) => {
                let subject = index.get(rel.subject.as_str());
                let object = index.get(rel.object.as_str());
                match (subject, object) {
                    (Some(s), Some(o)) => match (s.kind.known(), o.kind.known()) {
                        (Some(sk), Some(ok)) => {
                            if schema.predicate_is_legal(
                                sk,
                                s.metric_subtype,
                                predicate,
                                ok,
                                o.metric_subtype,
                            ) {
                                None
                            } else {
                                Some(flag(format!(
                                    "pattern {} → {predicate} → {} is not in the connection map",
                                    endpoint_desc(s),
                                    endpoint_desc(o),
                                )))
                            }
                        }
                        _ => Some(flag("an endpoint has a kind outside the ontology".to_string())),
                    },
                    _ => Some(flag("an endpoint id is not defined in the graph".to_string())),
                }
            }
        };
        if let Some(v) = violation {
            outcome.violations.push(v);
            outcome.relationship_indices.push(i);
        }
    }
    outcome
}

fn endpoint_desc(entity: &Entity) -> String {
    match (entity.kind.known(), entity.metric_subtype) {
        (Some(EntityKind::Metric), Some(st)) => st.as_str().to_string(),
        _ => entity.kind.as_str().to_string(),
    }
}

fn vr006_calculated_metric_links(graph: &KnowledgeGraph) -> RuleOutcome {
    let mut outcome = RuleOutcome {
        violations: Vec::new(),
        total: 0,
        entity_indices: Vec::new(),
        relationship_indices: Vec::new(),
    };
    let index = graph.entity_index();
    let mut link_counts: HashMap<&str, u64> = HashMap::new();
    for rel in &graph.relationships {
        if rel.predicate.known() == Some(Predicate::IsCalculatedBy) {
            let object_is_model = index
                .get(rel.object.as_str())
                .map(|o| o.kind.known() == Some(EntityKind::Model))
                .unwrap_or(false);
            if object_is_model {
                *link_counts.entry(rel.subject.as_str()).or_insert(0) += 1;
            }
        }
    }
    for (i, entity) in graph.entities.iter().enumerate() {
        if entity.kind.known() != Some(EntityKind::Metric)
            || entity.metric_subtype != Some(MetricSubtype::CalculatedMetric)
        {
            continue;
        }
        outcome.total += 1;
        let links = link_counts.get(entity.id.as_str()).copied().unwrap_or(0);
        if links != 1 {
            outcome.violations.push(entity_violation(
                RuleId::Vr006,
                entity,
                format!("calculated metric has {links} IsCalculatedBy links to a Model; exactly 1 required"),
            ));
            outcome.entity_indices.push(i);
        }
    }
    outcome
}

/// Runs one schema rule against a graph snapshot.
pub fn run_rule(rule: RuleId, graph: &KnowledgeGraph, schema: &OntologySchema) -> RuleOutcome {
    match rule {
        RuleId::Vr001 => vr001_id_uniqueness(graph),
        RuleId::Vr002 => vr002_required_fields(graph, schema),
        RuleId::Vr003 => vr003_metric_values(graph),
        RuleId::Vr004 => vr004_model_inputs(graph),
        RuleId::Vr005 => vr005_predicate_validity(graph, schema),
        RuleId::Vr006 => vr006_calculated_metric_links(graph),
        RuleId::Sem => panic!("SEM is not a schema rule"),
    }
}

/// Result of Phase 2.
pub struct SchemaValidationOutcome {
    pub graph: KnowledgeGraph,
    pub per_rule_pass: BTreeMap<String, PassCount>,
    /// Every violation logged, including cascade records and violations
    /// induced by earlier removal rounds.
    pub violations: Vec<Violation>,
    pub removed_counts: Counts,
}

/// Phase 2. All six rules are evaluated against the same snapshot before
/// anything is removed, so one defect cannot mask another on the same
/// element; `per_rule_pass` reflects that first snapshot. Removals then
/// apply (with relationship cascades), and the rules re-run on the result
/// until nothing more violates (removing a Model, for instance, newly
/// breaks the link rule on its CalculatedMetric).
pub fn schema_validate(graph: &KnowledgeGraph, schema: &OntologySchema) -> SchemaValidationOutcome {
    let mut current = graph.clone();
    let mut per_rule_pass: BTreeMap<String, PassCount> = BTreeMap::new();
    let mut all_violations: Vec<Violation> = Vec::new();
    let mut removed = Counts::default();

    let mut round = 0usize;
    loop {
        let outcomes: Vec<(RuleId, RuleOutcome)> = RuleId::SCHEMA_RULES
            .iter()
            .map(|&rule| (rule, run_rule(rule, &current, schema)))
            .collect();

        if round == 0 {
            for (rule, outcome) in &outcomes {
                per_rule_pass.insert(
                    rule.as_str().to_string(),
                    PassCount { passed: outcome.passed(), total: outcome.total },
                );
            }
        }

        let mut entity_removals: BTreeSet<usize> = BTreeSet::new();
        let mut relationship_removals: BTreeSet<usize> = BTreeSet::new();
        // First rule (in execution order) that flagged each entity, for
        // attributing cascade records.
        let mut entity_cause: HashMap<usize, RuleId> = HashMap::new();
        let mut any = false;
        for (rule, outcome) in &outcomes {
            if !outcome.violations.is_empty() {
                any = true;
            }
            for v in &outcome.violations {
                let mut v = v.clone();
                if round > 0 {
                    v.detail.push_str(" [induced by an earlier removal round]");
                }
                all_violations.push(v);
            }
            for &i in &outcome.entity_indices {
                entity_removals.insert(i);
                entity_cause.entry(i).or_insert(*rule);
            }
            relationship_removals.extend(outcome.relationship_indices.iter().copied());
        }
        if !any {
            break;
        }

        // Apply entity removals; an id only cascades once no occurrence of
        // it survives (a duplicate removed by VR001 leaves the first
        // occurrence defined).
        let mut surviving: Vec<Entity> = Vec::with_capacity(current.entities.len());
        let mut removed_ids: HashMap<String, RuleId> = HashMap::new();
        for (i, entity) in current.entities.iter().enumerate() {
            if entity_removals.contains(&i) {
                removed.entities += 1;
                removed_ids.entry(entity.id.clone()).or_insert(entity_cause[&i]);
            } else {
                surviving.push(entity.clone());
            }
        }
        let still_defined: HashSet<&str> = surviving.iter().map(|e| e.id.as_str()).collect();

        let mut surviving_rels: Vec<Relationship> = Vec::new();
        for (i, rel) in current.relationships.iter().enumerate() {
            if relationship_removals.contains(&i) {
                removed.relationships += 1;
                continue;
            }
            let cascade_endpoint = [&rel.subject, &rel.object]
                .into_iter()
                .find(|id| !still_defined.contains(id.as_str()) && removed_ids.contains_key(*id));
            if let Some(endpoint) = cascade_endpoint {
                removed.relationships += 1;
                all_violations.push(Violation {
                    rule_id: removed_ids[endpoint],
                    target_id: rel.key(),
                    target_kind: TargetKind::Relationship,
                    detail: format!("cascade: endpoint {endpoint} was removed"),
                    provenance: rel.provenance.first().cloned(),
                });
                continue;
            }
            surviving_rels.push(rel.clone());
        }

        current.entities = surviving;
        current.relationships = surviving_rels;
        round += 1;
    }

    SchemaValidationOutcome {
        graph: current,
        per_rule_pass,
        violations: all_violations,
        removed_counts: removed,
    }
}

// ---------------------------------------------------------------------------
// Full two-phase run
// ---------------------------------------------------------------------------

/// Runs Phase 1, cascades, then Phase 2, and assembles the report. The
/// returned graph is a fixpoint: validating it again (with an all-affirming
/// backend) removes nothing.
pub fn validate_graph(
    graph: &KnowledgeGraph,
    backend: &dyn CompletionBackend,
    schema: &OntologySchema,
    options: &ValidationOptions,
) -> (KnowledgeGraph, ValidationReport) {
    let input_counts = Counts::of(graph);

    let phase1 = semantic_validate(graph, backend, schema, options);
    let mut phase1_removed = phase1.violations;
    let mut surviving = KnowledgeGraph::new(graph.stage);
    surviving.relationships = graph.relationships.clone();
    let mut removed_entities = 0u64;
    for (entity, keep) in graph.entities.iter().zip(&phase1.keep) {
        if *keep {
            surviving.entities.push(entity.clone());
        } else {
            removed_entities += 1;
        }
    }
    let still_defined: HashSet<&str> = surviving.entities.iter().map(|e| e.id.as_str()).collect();
    let fully_removed: BTreeSet<String> = graph
        .entities
        .iter()
        .filter(|e| !still_defined.contains(e.id.as_str()))
        .map(|e| e.id.clone())
        .collect();
    let (after_cascade, cascaded) = cascade_filter(&surviving, &fully_removed);
    for rel in &cascaded {
        let endpoint = if fully_removed.contains(&rel.subject) { &rel.subject } else { &rel.object };
        phase1_removed.push(Violation {
            rule_id: RuleId::Sem,
            target_id: rel.key(),
            target_kind: TargetKind::Relationship,
            detail: format!("cascade: endpoint {endpoint} was removed in Phase 1"),
            provenance: rel.provenance.first().cloned(),
        });
    }
    let phase1_removed_counts =
        Counts { entities: removed_entities, relationships: cascaded.len() as u64 };

    let phase2 = schema_validate(&after_cascade, schema);

    let mut validated = phase2.graph;
    validated.stage = Stage::Validated;
    let output_counts = Counts::of(&validated);

    let report = ValidationReport {
        input_counts,
        phase1_removed,
        phase2_removed: phase2.violations,
        per_rule_pass: phase2.per_rule_pass,
        phase1_removed_counts,
        phase2_removed_counts: phase2.removed_counts,
        output_counts,
        semantic_calls: phase1.calls,
        token_usage: phase1.token_usage,
        warnings: phase1.warnings,
    };
    (validated, report)
}
