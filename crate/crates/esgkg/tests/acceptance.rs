//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! 1. Metric formulas reproduce the reference figures.
//! 2. Oracle end-to-end equivalence over 100 random ground-truth graphs.
//! 3. Validator soundness/completeness under fault injection (VR001–VR006).
//! 4. Baseline-mode adversarial fixture filters to ≤ 3.1% / 0 relationships.
//! 5. Segmentation determinism and page partition.
//! 6. Accounting identities (asserted inside suites 2–4 and here).
//! 7. Prompt fidelity: nine components, connection map, rules, markers.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use esgkg::backend::{OracleBackend, OracleTruth, TokenUsage};
use esgkg::bundle::{DocumentBundle, Page};
use esgkg::consolidation::consolidate;
use esgkg::extraction::{
    build_prompt, extract_document, ExtractionMode, ExtractionOptions, ExtractionResult,
    PromptTemplates, COMPONENT_HEADERS,
};
use esgkg::graph::{DeclaredKind, DeclaredPredicate, Entity, KnowledgeGraph, Provenance, Relationship, Stage};
use esgkg::metrics::{
    compute_quality_metrics, cost_per_entity, cost_waste_ratio, relationship_retention,
    CostLedger, ExtractedCounts, ModelPrice, PriceTable,
};
use esgkg::ontology::{EntityKind, MetricSubtype, OntologySchema, Predicate};
use esgkg::segmenter::{segment_document, SegmenterConfig};
use esgkg::synth::{generate_case, graphs_equivalent, SynthConfig};
use esgkg::validation::{validate_graph, RuleId, ValidationOptions};

fn pass(criterion: u32, name: &str, started: Instant) {
    println!("ACCEPTANCE {criterion} ({name}): PASS ({:?})", started.elapsed());
}

// ---------------------------------------------------------------------------
// Criterion 1: metric-formula reproduction
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_metric_formula_reproduction() {
    let started = Instant::now();

    let retention_cb = relationship_retention(42, 53).unwrap().value;
    assert!((retention_cb - 79.2).abs() <= 0.05, "{retention_cb}");
    let retention_sc = relationship_retention(64, 71).unwrap().value;
    assert!((retention_sc - 90.1).abs() <= 0.05, "{retention_sc}");

    let waste_guided = cost_waste_ratio(69, 364).unwrap().value;
    assert!((waste_guided - 19.0).abs() <= 0.1, "{waste_guided}");
    let waste_baseline = cost_waste_ratio(213, 219).unwrap().value;
    assert!((waste_baseline - 97.3).abs() <= 0.1, "{waste_baseline}");

    let mut models = BTreeMap::new();
    models.insert("model-x".to_string(), ModelPrice { input_per_mtok: 2.0, output_per_mtok: 10.0 });
    let prices = PriceTable { version: "fixture".into(), models };
    // Stage costs: 3.00 + 1.00 and 0.50 + 0.07 give the guided total 4.57.
    let guided = CostLedger::from_usage(
        "model-x",
        TokenUsage::new(1_500_000, 100_000),
        TokenUsage::new(250_000, 7_000),
        &prices,
    );
    assert!((guided.total_cost() - 4.57).abs() < 1e-9);
    let guided_unit = cost_per_entity(&guided, 295).finite().unwrap();
    assert!((guided_unit - 0.0155).abs() <= 0.0005, "{guided_unit}");

    // 4.00 + 0.48 gives the baseline total 4.48.
    let baseline = CostLedger::from_usage(
        "model-x",
        TokenUsage::new(2_000_000, 0),
        TokenUsage::new(0, 48_000),
        &prices,
    );
    assert!((baseline.total_cost() - 4.48).abs() < 1e-9);
    let baseline_unit = cost_per_entity(&baseline, 6).finite().unwrap();
    assert!((baseline_unit - 0.747).abs() <= 0.005, "{baseline_unit}");

    let ratio = baseline_unit / guided_unit;
    assert!((ratio - 48.0).abs() <= 1.0, "{ratio}");

    assert!(started.elapsed().as_secs_f64() < 1.0);
    pass(1, "metric-formula reproduction", started);
}

// ---------------------------------------------------------------------------
// Criterion 2: oracle end-to-end equivalence
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_oracle_end_to_end_equivalence() {
    let started = Instant::now();
    let schema = OntologySchema::esgmkg();

    for seed in 0..100u64 {
        let case = generate_case(&SynthConfig::seeded(seed));
        let backend = OracleBackend::new(case.oracle.clone());

        let segmented = segment_document(&case.bundle, &SegmenterConfig::default()).unwrap();
        let options = ExtractionOptions {
            mode: ExtractionMode::Ontology,
            parallelism: 4,
            ..Default::default()
        };
        let extraction = extract_document(&segmented, &backend, &schema, &options).unwrap();
        assert!(extraction.failures.is_empty(), "seed {seed}: {:?}", extraction.failures);
        let raw = ExtractedCounts {
            entities: extraction.entity_count(),
            relationships: extraction.relationship_count(),
        };

        let (consolidated, _log) = consolidate(&extraction.results);
        consolidated.check_invariants().unwrap();

        let validation_options = ValidationOptions { parallelism: 3, ..Default::default() };
        let (validated, report) =
            validate_graph(&consolidated, &backend, &schema, &validation_options);
        graphs_equivalent(&validated, &case.truth)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));

        assert!(report.accounting_holds(), "seed {seed}");
        let ledger = CostLedger::from_usage(
            "oracle",
            extraction.token_usage,
            report.token_usage,
            &PriceTable::zero(),
        );
        let metrics = compute_quality_metrics(raw, &report, &ledger).unwrap();
        assert_eq!(metrics.semantic_accuracy, 100.0, "seed {seed}");
        assert_eq!(metrics.schema_compliance, 100.0, "seed {seed}");

        // Accounting: waste is the exact complement of the retained share.
        let waste = cost_waste_ratio(raw.entities - validated.entity_count(), raw.entities)
            .unwrap()
            .value;
        let retained = validated.entity_count() as f64 * 100.0 / raw.entities as f64;
        assert_eq!(waste + retained, 100.0, "seed {seed}");
    }

    assert!(started.elapsed().as_secs_f64() < 30.0);
    pass(2, "oracle end-to-end equivalence, 100 graphs", started);
}

// ---------------------------------------------------------------------------
// Criterion 3: validator soundness/completeness under fault injection
// ---------------------------------------------------------------------------

/// Independent removal oracle: drop the planted targets, then settle the
/// only non-local consequence: relationships needing both endpoints, and
/// calculated metrics needing exactly one IsCalculatedBy edge to a model.
fn settle(mut graph: KnowledgeGraph) -> KnowledgeGraph {
    loop {
        let ids: HashSet<String> = graph.entities.iter().map(|e| e.id.clone()).collect();
        graph
            .relationships
            .retain(|r| ids.contains(&r.subject) && ids.contains(&r.object));
        let models: HashSet<&str> = graph
            .entities
            .iter()
            .filter(|e| e.kind.known() == Some(EntityKind::Model))
            .map(|e| e.id.as_str())
            .collect();
        let mut links: BTreeMap<&str, u64> = BTreeMap::new();
        for r in &graph.relationships {
            if r.predicate.known() == Some(Predicate::IsCalculatedBy)
                && models.contains(r.object.as_str())
            {
                *links.entry(r.subject.as_str()).or_insert(0) += 1;
            }
        }
        let bad: HashSet<String> = graph
            .entities
            .iter()
            .filter(|e| {
                e.kind.known() == Some(EntityKind::Metric)
                    && e.metric_subtype == Some(MetricSubtype::CalculatedMetric)
                    && links.get(e.id.as_str()).copied().unwrap_or(0) != 1
            })
            .map(|e| e.id.clone())
            .collect();
        if bad.is_empty() {
            return graph;
        }
        graph.entities.retain(|e| !bad.contains(&e.id));
    }
}

fn pick_distinct<F: Fn(&Entity) -> bool>(
    graph: &KnowledgeGraph,
    want: usize,
    rng_seed: u64,
    eligible: F,
) -> Vec<usize> {
    let candidates: Vec<usize> = graph
        .entities
        .iter()
        .enumerate()
        .filter(|(_, e)| eligible(e))
        .map(|(i, _)| i)
        .collect();
    // Cheap deterministic shuffle by a multiplicative hash of the seed.
    let mut picked: Vec<usize> = candidates.clone();
    picked.sort_by_key(|i| (i.wrapping_mul(2654435761).wrapping_add(rng_seed as usize)) % 10007);
    picked.truncate(want.min(candidates.len()));
    picked
}

struct InjectionOutcome {
    validated: KnowledgeGraph,
    expected: KnowledgeGraph,
    accounting: bool,
}

fn inject_and_validate(rule: RuleId, seed: u64) -> Option<InjectionOutcome> {
    let case = generate_case(&SynthConfig {
        seed,
        min_entities: 8,
        max_entities: 40,
        ..Default::default()
    });
    let mut graph = case.truth.clone();
    graph.stage = Stage::Consolidated;
    let k = (seed % 4 + 1) as usize;
    let schema = OntologySchema::esgmkg();

    let mut planted_entities: BTreeSet<usize> = BTreeSet::new();
    let mut planted_rel_keys: BTreeSet<String> = BTreeSet::new();
    match rule {
        RuleId::Vr001 => {
            for &i in &pick_distinct(&graph, k, seed, |_| true) {
                let copy = graph.entities[i].clone();
                graph.entities.push(copy);
                planted_entities.insert(graph.entities.len() - 1);
            }
        }
        RuleId::Vr002 => {
            for &i in &pick_distinct(&graph, k, seed, |_| true) {
                let entity = &mut graph.entities[i];
                match entity.kind.known() {
                    Some(EntityKind::ReportingFramework) => {
                        entity.properties.remove("name");
                    }
                    Some(EntityKind::Category) => {
                        entity.properties.remove("section_title");
                    }
                    Some(EntityKind::Metric) => {
                        entity.properties.remove("measurement_type");
                    }
                    Some(EntityKind::Model) => {
                        entity.properties.remove("equation");
                    }
                    _ => entity.label = String::new(),
                }
                planted_entities.insert(i);
            }
        }
        RuleId::Vr003 => {
            let picked = pick_distinct(&graph, k, seed, |e| {
                e.kind.known() == Some(EntityKind::Metric)
            });
            for &i in &picked {
                let field = if i % 2 == 0 { "unit" } else { "code" };
                graph.entities[i].properties.insert(field.into(), serde_json::json!(""));
                planted_entities.insert(i);
            }
        }
        RuleId::Vr004 => {
            let picked = pick_distinct(&graph, k, seed, |e| {
                e.kind.known() == Some(EntityKind::Model)
            });
            for &i in &picked {
                graph.entities[i]
                    .properties
                    .insert("input_variables".into(), serde_json::json!([]));
                planted_entities.insert(i);
            }
        }
        RuleId::Vr005 => {
            let n = graph.entities.len();
            for j in 0..k {
                let a = (seed as usize + j) % n;
                let b = (seed as usize + j * 3 + 1) % n;
                if graph.entities[a].id == graph.entities[b].id {
                    continue;
                }
                let predicate = if j % 2 == 0 {
                    DeclaredPredicate::Unknown(format!("RelatedTo{j}"))
                } else {
                    // A known predicate on an illegal pattern that cannot
                    // touch the calculated-metric link rule.
                    if graph.entities[a].kind.known() == Some(EntityKind::Industry) {
                        DeclaredPredicate::Known(Predicate::Include)
                    } else {
                        DeclaredPredicate::Known(Predicate::ReportUsing)
                    }
                };
                let rel = Relationship {
                    subject: graph.entities[a].id.clone(),
                    predicate,
                    object: graph.entities[b].id.clone(),
                    provenance: graph.entities[a].provenance.clone(),
                };
                if graph.relationships.iter().any(|r| r.key() == rel.key()) {
                    continue;
                }
                planted_rel_keys.insert(rel.key());
                graph.relationships.push(rel);
            }
            if planted_rel_keys.is_empty() {
                return None;
            }
        }
        RuleId::Vr006 => {
            let picked = pick_distinct(&graph, k, seed, |e| {
                e.kind.known() == Some(EntityKind::Metric)
                    && e.metric_subtype == Some(MetricSubtype::CalculatedMetric)
            });
            if picked.is_empty() {
                return None;
            }
            for &i in &picked {
                let cm_id = graph.entities[i].id.clone();
                if i % 2 == 0 {
                    graph.relationships.retain(|r| {
                        !(r.subject == cm_id
                            && r.predicate.known() == Some(Predicate::IsCalculatedBy))
                    });
                } else {
                    let existing = graph
                        .relationships
                        .iter()
                        .find(|r| {
                            r.subject == cm_id
                                && r.predicate.known() == Some(Predicate::IsCalculatedBy)
                        })
                        .expect("clean calculated metrics have a model link")
                        .clone();
                    // A second link to the same model still breaks the
                    // exactly-one requirement.
                    graph.relationships.push(existing);
                }
                planted_entities.insert(i);
            }
        }
        RuleId::Sem => unreachable!(),
    }
    let planted = if rule == RuleId::Vr005 { planted_rel_keys.len() } else { planted_entities.len() };
    if planted == 0 {
        return None;
    }

    // Expected final graph via the independent simulator.
    let mut expected = graph.clone();
    if rule == RuleId::Vr005 {
        expected.relationships.retain(|r| !planted_rel_keys.contains(&r.key()));
    } else {
        let keep: Vec<bool> =
            (0..expected.entities.len()).map(|i| !planted_entities.contains(&i)).collect();
        let mut survivors = Vec::new();
        for (e, keep) in expected.entities.iter().zip(keep) {
            if keep {
                survivors.push(e.clone());
            }
        }
        expected.entities = survivors;
        // VR001 plants duplicate occurrences; the id itself stays defined.
        if rule == RuleId::Vr001 {
            expected = case.truth.clone();
        }
    }
    let expected = settle(expected);

    let backend = OracleBackend::new(OracleTruth::default());
    let (validated, report) =
        validate_graph(&graph, &backend, &schema, &ValidationOptions::default());
    let reported = report.per_rule_pass[rule.as_str()].violations();
    assert_eq!(reported, planted as u64, "{rule} seed {seed}: reported != planted");

    Some(InjectionOutcome { validated, expected, accounting: report.accounting_holds() })
}

#[test]
fn criterion_3_validator_fault_injection() {
    let started = Instant::now();
    for rule in RuleId::SCHEMA_RULES {
        let mut instances = 0;
        let mut seed = 0u64;
        while instances < 50 {
            seed += 1;
            let Some(outcome) = inject_and_validate(rule, seed) else { continue };
            graphs_equivalent(&outcome.validated, &outcome.expected)
                .unwrap_or_else(|e| panic!("{rule} seed {seed}: {e}"));
            assert!(outcome.accounting, "{rule} seed {seed}: accounting identity failed");
            instances += 1;
        }
    }
    assert!(started.elapsed().as_secs_f64() < 10.0);
    pass(3, "validator fault injection, 6 rules x 50 instances", started);
}

// ---------------------------------------------------------------------------
// Criterion 4: baseline-mode filtering shape
// ---------------------------------------------------------------------------

fn adversarial_baseline_results() -> Vec<ExtractionResult> {
    let prov = |segment: &str| Provenance {
        doc_id: "adversarial".into(),
        segment_id: segment.into(),
        segment_title: "Baseline".into(),
        page_range: (3, 5),
        quote: None,
    };
    let unknown_kinds =
        ["Standard", "Organization", "Sector", "Topic", "Requirement", "Disclosure"];
    let mut entities = Vec::new();
    for i in 0..120 {
        entities.push(Entity {
            id: format!("item_{i:03}"),
            kind: DeclaredKind::Unknown(unknown_kinds[i % unknown_kinds.len()].to_string()),
            metric_subtype: None,
            label: format!("Hallucinated thing {i}"),
            description: "freeform".into(),
            properties: BTreeMap::new(),
            provenance: vec![prov("seg_01")],
        });
    }
    // Three survivors: fully fielded, known kinds.
    let mut industry = Entity {
        id: "industry_adv_3_01".into(),
        kind: DeclaredKind::Known(EntityKind::Industry),
        metric_subtype: None,
        label: "Adversarial Industry".into(),
        description: "The sector in scope.".into(),
        properties: BTreeMap::new(),
        provenance: vec![prov("seg_01")],
    };
    industry.properties.insert("sector".into(), serde_json::json!("finance"));
    let mut framework = industry.clone();
    framework.id = "framework_adv_3_01".into();
    framework.kind = DeclaredKind::Known(EntityKind::ReportingFramework);
    framework.label = "Adversarial Framework".into();
    framework.properties = BTreeMap::new();
    framework.properties.insert("name".into(), serde_json::json!("Adversarial Framework"));
    let mut category = industry.clone();
    category.id = "category_adv_3_01".into();
    category.kind = DeclaredKind::Known(EntityKind::Category);
    category.label = "Adversarial Category".into();
    category.properties = BTreeMap::new();
    category.properties.insert("section_title".into(), serde_json::json!("Topics"));
    entities.push(industry);
    entities.push(framework);
    entities.push(category);

    let bad_predicates = ["mentions", "refers_to", "part_of", "related"];
    let mut relationships = Vec::new();
    for i in 0..161 {
        relationships.push(Relationship {
            subject: format!("item_{:03}", i % 120),
            predicate: DeclaredPredicate::Unknown(bad_predicates[i % bad_predicates.len()].into()),
            object: format!("item_{:03}", (i + 7) % 120),
            provenance: vec![prov("seg_01")],
        });
    }

    vec![ExtractionResult {
        segment_id: "seg_01".into(),
        entities,
        relationships,
        quality_flags: vec![],
        token_usage: TokenUsage::new(200_000, 40_000),
    }]
}

#[test]
fn criterion_4_baseline_filtering_shape() {
    let started = Instant::now();
    let results = adversarial_baseline_results();
    let raw = ExtractedCounts { entities: 123, relationships: 161 };
    assert_eq!(results[0].entities.len() as u64, raw.entities);
    assert_eq!(results[0].relationships.len() as u64, raw.relationships);

    let (consolidated, _) = consolidate(&results);
    let backend = OracleBackend::new(OracleTruth::default());
    let (validated, report) = validate_graph(
        &consolidated,
        &backend,
        &OntologySchema::esgmkg(),
        &ValidationOptions::default(),
    );

    assert_eq!(validated.relationship_count(), 0);
    let retention_pct = validated.entity_count() as f64 * 100.0 / raw.entities as f64;
    assert!(retention_pct <= 3.1, "{retention_pct}");
    assert_eq!(validated.entity_count(), 3);
    assert!(report.accounting_holds());

    // Unknown kinds must not consume semantic calls: only the 3 known-kind
    // entities are checked.
    assert_eq!(report.semantic_calls, 3);

    let ledger = CostLedger::from_usage(
        "oracle",
        results[0].token_usage,
        report.token_usage,
        &PriceTable::zero(),
    );
    let metrics = compute_quality_metrics(raw, &report, &ledger).unwrap();
    assert!(metrics.cost_waste_ratio >= 90.0);
    assert!(metrics.semantic_accuracy <= 3.1);

    assert!(started.elapsed().as_secs_f64() < 5.0);
    pass(4, "baseline adversarial filtering", started);
}

// ---------------------------------------------------------------------------
// Criterion 5: segmentation determinism and partition
// ---------------------------------------------------------------------------

fn commercial_banks_shaped_bundle() -> DocumentBundle {
    // 23 pages, 10 sections: title page, TOC, sections on pages 3..=23.
    let starts = [3u32, 5, 7, 9, 11, 13, 15, 17, 19, 22];
    let mut toc = String::from("Table of Contents\n");
    for (i, start) in starts.iter().enumerate() {
        toc.push_str(&format!("{} Section Topic {} ...... {start}\n", i + 1, i + 1));
    }
    let mut pages = vec![
        Page { number: 1, text: "Sample Industry Standard".into(), tables: vec![] },
        Page { number: 2, text: toc, tables: vec![] },
    ];
    for n in 3..=23u32 {
        pages.push(Page {
            number: n,
            text: format!("Narrative requirements appearing on page {n}.\nDisclosure guidance continues."),
            tables: vec![],
        });
    }
    DocumentBundle { doc_id: "sample_cb".into(), title: "Sample Industry Standard".into(), pages }
        .finalize()
        .unwrap()
}

#[test]
fn criterion_5_segmentation_determinism_and_partition() {
    let started = Instant::now();
    let config = SegmenterConfig::default();

    for seed in 0..10u64 {
        let case = generate_case(&SynthConfig::seeded(seed));
        let a = segment_document(&case.bundle, &config).unwrap();
        let b = segment_document(&case.bundle, &config).unwrap();
        assert_eq!(
            serde_json::to_string_pretty(&a).unwrap(),
            serde_json::to_string_pretty(&b).unwrap(),
            "seed {seed}: reruns differ"
        );

        // Page ranges partition the post-TOC span exactly.
        let last = case.bundle.last_page();
        let mut covered = BTreeSet::new();
        for segment in &a.segments {
            let (start, end) = segment.page_range;
            for p in start..=end {
                assert!(covered.insert(p), "seed {seed}: page {p} covered twice");
            }
        }
        let expected: BTreeSet<u32> = (a.toc_page + 1..=last).collect();
        assert_eq!(covered, expected, "seed {seed}: coverage gap");
    }

    let bundle = commercial_banks_shaped_bundle();
    let doc = segment_document(&bundle, &config).unwrap();
    assert_eq!(doc.segments.len(), 10);
    let mut covered = BTreeSet::new();
    for segment in &doc.segments {
        for p in segment.page_range.0..=segment.page_range.1 {
            assert!(covered.insert(p));
        }
    }
    assert_eq!(covered, (3..=23).collect::<BTreeSet<u32>>());

    assert!(started.elapsed().as_secs_f64() < 5.0);
    pass(5, "segmentation determinism and partition", started);
}

// ---------------------------------------------------------------------------
// Criterion 6: accounting identities
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_accounting_identities() {
    // The per-run accounting identity and the waste/retention complement are
    // asserted inside suites 2-4 on every pipeline run; this spot-checks the
    // complement identity over a sweep of count pairs.
    let started = Instant::now();
    for extracted in 1..=200u64 {
        for validated in [0, 1, extracted / 3, extracted / 2, extracted] {
            if validated > extracted {
                continue;
            }
            let waste = cost_waste_ratio(extracted - validated, extracted).unwrap().value;
            let retained = validated as f64 * 100.0 / extracted as f64;
            assert_eq!(waste + retained, 100.0, "({validated}, {extracted})");
        }
    }
    pass(6, "accounting identities", started);
}

// ---------------------------------------------------------------------------
// Criterion 7: prompt fidelity
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_prompt_fidelity() {
    let started = Instant::now();
    let segment = esgkg::segmenter::Segment {
        id: "seg_02_1".into(),
        title: "Emissions Disclosures".into(),
        page_range: (3, 7),
        content: "The entity shall disclose its gross emissions annually.".into(),
        tables: vec![],
        section_number: "1".into(),
    };
    let schema = OntologySchema::esgmkg();
    let templates = PromptTemplates::default();

    let prompt =
        build_prompt(&segment, "Sample Standard", &schema, ExtractionMode::Ontology, &templates)
            .unwrap();

    // All nine components present, in order.
    let mut last = 0usize;
    for header in COMPONENT_HEADERS {
        let pos = prompt.find(header).unwrap_or_else(|| panic!("missing component {header}"));
        assert!(pos >= last, "component out of order: {header}");
        last = pos;
    }
    // The five connection-map lines.
    for line in [
        "Industry → ReportUsing → ReportingFramework",
        "ReportingFramework → Include → Category",
        "Category → ConsistOf → Metric",
        "CalculatedMetric → IsCalculatedBy → Model",
        "Model → RequiresInputFrom → InputMetric",
    ] {
        assert!(prompt.contains(line), "missing connection-map line {line}");
    }
    // The seven numbered structural rules.
    for i in 1..=7 {
        assert!(prompt.contains(&format!("({i}) ")), "missing structural rule ({i})");
    }
    // Segment markers exactly once.
    assert_eq!(prompt.matches("$$$SEGMENT_START$$$").count(), 1);
    assert_eq!(prompt.matches("$$$SEGMENT_END$$$").count(), 1);

    let baseline =
        build_prompt(&segment, "Sample Standard", &schema, ExtractionMode::Baseline, &templates)
            .unwrap();
    for token in [
        "ReportUsing",
        "Include",
        "ConsistOf",
        "IsCalculatedBy",
        "RequiresInputFrom",
        "ESGMKG",
        "Industry",
        "ReportingFramework",
        "Category",
        "Metric",
        "Model",
        "$$$SEGMENT_START$$$",
    ] {
        assert!(!baseline.contains(token), "baseline prompt leaked {token}");
    }

    assert!(started.elapsed().as_secs_f64() < 1.0);
    pass(7, "prompt fidelity", started);
}
