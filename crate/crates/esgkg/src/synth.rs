//! Synthetic ground-truth corpora.
//!
//! Generates a random but rule-clean knowledge graph together with a
//! document bundle and oracle responses that extract back to exactly that
//! graph. Planted duplicates (same id, or alias ids sharing label and code)
//! and dangling edges exercise consolidation; the ground truth is what must
//! come out the other end of the full pipeline.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::backend::OracleTruth;
use crate::bundle::{DocumentBundle, Page};
use crate::graph::{DeclaredKind, DeclaredPredicate, Entity, KnowledgeGraph, Provenance, Relationship, Stage};
use crate::ontology::{EntityKind, MetricSubtype, OntologySchema, Predicate};
use crate::segmenter::{segment_document, SegmentedDocument, SegmenterConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Smallest graph that can carry all five kinds, all five predicates
    /// and a parseable three-line TOC is seven entities.
    pub min_entities: usize,
    pub max_entities: usize,
    pub duplicate_probability: f64,
    pub dangling_edges: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            min_entities: 7,
            max_entities: 100,
            duplicate_probability: 0.35,
            dangling_edges: 1,
        }
    }
}

impl SynthConfig {
    pub fn seeded(seed: u64) -> SynthConfig {
        SynthConfig { seed, ..Default::default() }
    }
}

/// One generated case: the bundle to feed in, the oracle that answers for
/// it, and the graph the pipeline must reproduce.
pub struct SynthCase {
    pub doc_slug: String,
    pub bundle: DocumentBundle,
    pub segments: SegmentedDocument,
    pub oracle: OracleTruth,
    pub truth: KnowledgeGraph,
}

const CATEGORY_TITLES: [&str; 8] = [
    "Greenhouse Gas Emissions",
    "Data Security",
    "Water Management",
    "Energy Management",
    "Workforce Health",
    "Business Ethics",
    "Climate Risk Exposure",
    "Financed Emissions",
];

const UNITS: [&str; 5] = ["tCO2-e", "percent of revenue", "gigajoules", "cubic metres", "hours"];

struct Section {
    number: String,
    title: String,
    start_page: u32,
    end_page: u32,
    entities: Vec<Entity>,
    relationships: Vec<Relationship>,
    sentences: Vec<String>,
}

struct Builder {
    schema: OntologySchema,
    slug: String,
    ordinals: BTreeMap<(EntityKind, u32), u32>,
}

impl Builder {
    fn next_id(&mut self, kind: EntityKind, page: u32) -> String {
        let ordinal = self.ordinals.entry((kind, page)).or_insert(0);
        *ordinal += 1;
        self.schema
            .make_entity_id(kind, &self.slug, page, *ordinal)
            .expect("generator slugs and pages are valid")
    }
}

fn provenance_for(section: &Section, doc_id: &str, segment_id: &str) -> Provenance {
    Provenance {
        doc_id: doc_id.to_string(),
        segment_id: segment_id.to_string(),
        segment_title: section.title.clone(),
        page_range: (section.start_page, section.end_page),
        quote: None,
    }
}

fn entity(
    id: String,
    kind: EntityKind,
    subtype: Option<MetricSubtype>,
    label: String,
    description: String,
    properties: BTreeMap<String, serde_json::Value>,
) -> Entity {
    Entity {
        id,
        kind: DeclaredKind::Known(kind),
        metric_subtype: subtype,
        label,
        description,
        properties,
        provenance: Vec::new(),
    }
}

fn metric_properties(subtype: MetricSubtype, unit: &str, code: &str) -> BTreeMap<String, serde_json::Value> {
    let mut p = BTreeMap::new();
    p.insert("measurement_type".into(), serde_json::json!("Quantitative"));
    p.insert("metric_type".into(), serde_json::json!(subtype.as_str()));
    p.insert("unit".into(), serde_json::json!(unit));
    p.insert("code".into(), serde_json::json!(code));
    p
}

fn rel(subject: &str, predicate: Predicate, object: &str) -> Relationship {
    Relationship {
        subject: subject.to_string(),
        predicate: DeclaredPredicate::Known(predicate),
        object: object.to_string(),
        provenance: Vec::new(),
    }
}

/// JSON payload form of one entity, the shape the extraction prompt asks
/// for. No `source` object is emitted, so provenance quotes stay empty.
fn entity_payload(e: &Entity) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("id".into(), serde_json::json!(e.id));
    obj.insert("type".into(), serde_json::json!(e.kind.as_str()));
    obj.insert("label".into(), serde_json::json!(e.label));
    obj.insert("description".into(), serde_json::json!(e.description));
    for (k, v) in &e.properties {
        obj.insert(k.clone(), v.clone());
    }
    serde_json::Value::Object(obj)
}

fn relationship_payload(r: &Relationship) -> serde_json::Value {
    serde_json::json!({
        "subject": r.subject,
        "predicate": r.predicate.as_str(),
        "object": r.object,
    })
}

fn section_response(doc_id: &str, section: &Section) -> String {
    let body = serde_json::json!({
        "meta": {"doc_id": doc_id, "section": section.number},
        "entities": section.entities.iter().map(entity_payload).collect::<Vec<_>>(),
        "relationships": section.relationships.iter().map(relationship_payload).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&body).expect("payload serializes")
}

/// Generates one synthetic case. Deterministic in the seed.
pub fn generate_case(config: &SynthConfig) -> SynthCase {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let slug = format!("synth{}", config.seed);
    let doc_id = slug.clone();
    let title = format!("Synthetic Disclosure Standard {}", config.seed);
    let schema = OntologySchema::esgmkg();
    let mut builder = Builder { schema, slug: slug.clone(), ordinals: BTreeMap::new() };

    let min = config.min_entities.max(7);
    let max = config.max_entities.max(min);
    let target = rng.random_range(min..=max);
    // Two core entities, then categories, then at least one full
    // calculation triple (CalculatedMetric, Model, InputMetric).
    let category_count = rng.random_range(2..=5.min(target - 5));
    let mut extra_slots = target - 2 - category_count - 3;

    // Plan sections: overview plus one per category, with 1-2 pages each.
    let mut sections: Vec<Section> = Vec::new();
    let mut next_page = 3u32;
    for i in 0..=category_count {
        let pages = rng.random_range(1..=2u32);
        let section_title = if i == 0 {
            "Overview".to_string()
        } else {
            let base = CATEGORY_TITLES[(i - 1) % CATEGORY_TITLES.len()];
            if i - 1 < CATEGORY_TITLES.len() { base.to_string() } else { format!("{base} Part {i}") }
        };
        sections.push(Section {
            number: (i + 1).to_string(),
            title: section_title,
            start_page: next_page,
            end_page: next_page + pages - 1,
            entities: Vec::new(),
            relationships: Vec::new(),
            sentences: Vec::new(),
        });
        next_page += pages;
    }

    // Overview: industry, framework, ReportUsing.
    let industry_id = builder.next_id(EntityKind::Industry, sections[0].start_page);
    let framework_id = builder.next_id(EntityKind::ReportingFramework, sections[0].start_page);
    let industry = entity(
        industry_id.clone(),
        EntityKind::Industry,
        None,
        format!("Synthetic Industry {}", config.seed),
        "The industry sector covered by this synthetic standard.".into(),
        BTreeMap::new(),
    );
    let mut framework_props = BTreeMap::new();
    framework_props.insert("name".into(), serde_json::json!(title.clone()));
    framework_props.insert("version".into(), serde_json::json!("2025"));
    let framework = entity(
        framework_id.clone(),
        EntityKind::ReportingFramework,
        None,
        title.clone(),
        "The reporting framework defined by this synthetic standard.".into(),
        framework_props,
    );
    sections[0].sentences.push(format!(
        "This standard applies to {} and is reported under {}.",
        industry.label, framework.label
    ));
    sections[0].entities.push(industry);
    sections[0].entities.push(framework);
    sections[0].relationships.push(rel(&industry_id, Predicate::ReportUsing, &framework_id));

    // Categories and their contents.
    let mut category_ids: Vec<String> = Vec::new();
    let mut metric_counter = 0usize;
    let mut metric_home: Vec<(String, usize, String)> = Vec::new(); // (metric id, section idx, category id)

    let add_direct_metric =
        |builder: &mut Builder, rng: &mut ChaCha8Rng, sections: &mut Vec<Section>, section_idx: usize,
         category_id: &str, counter: &mut usize, homes: &mut Vec<(String, usize, String)>| {
            *counter += 1;
            let page = sections[section_idx].start_page;
            let id = builder.next_id(EntityKind::Metric, page);
            let unit = UNITS[rng.random_range(0..UNITS.len())];
            let code = format!("EM-{:03}a.{}", *counter, rng.random_range(1..=4));
            let label = format!("Synthetic Metric {counter}");
            let m = entity(
                id.clone(),
                EntityKind::Metric,
                Some(MetricSubtype::DirectMetric),
                label.clone(),
                format!("Directly reported disclosure number {counter}."),
                metric_properties(MetricSubtype::DirectMetric, unit, &code),
            );
            sections[section_idx]
                .sentences
                .push(format!("The metric {label} (code {code}) shall be disclosed in {unit}."));
            sections[section_idx].entities.push(m);
            sections[section_idx].relationships.push(rel(category_id, Predicate::ConsistOf, &id));
            homes.push((id, section_idx, category_id.to_string()));
        };

    for c in 0..category_count {
        let section_idx = c + 1;
        let page = sections[section_idx].start_page;
        let id = builder.next_id(EntityKind::Category, page);
        let label = sections[section_idx].title.clone();
        let mut props = BTreeMap::new();
        props.insert("section_title".into(), serde_json::json!(label.clone()));
        let cat = entity(
            id.clone(),
            EntityKind::Category,
            None,
            label.clone(),
            format!("Disclosure topic: {label}."),
            props,
        );
        sections[section_idx].sentences.push(format!("This section addresses {label}."));
        sections[section_idx].entities.push(cat);
        sections[section_idx].relationships.push(rel(&framework_id, Predicate::Include, &id));
        category_ids.push(id);
    }

    // The mandatory calculation triple lives in the first category; its
    // input metric sits in the second so both categories have content.
    let add_triple = |builder: &mut Builder,
                          rng: &mut ChaCha8Rng,
                          sections: &mut Vec<Section>,
                          cm_section: usize,
                          cm_category: &str,
                          im_section: usize,
                          im_category: &str,
                          counter: &mut usize,
                          homes: &mut Vec<(String, usize, String)>| {
        *counter += 1;
        let cm_page = sections[cm_section].start_page;
        let cm_id = builder.next_id(EntityKind::Metric, cm_page);
        let cm_code = format!("EM-{:03}a.{}", *counter, rng.random_range(1..=4));
        let cm_label = format!("Synthetic Intensity {counter}");
        let unit = UNITS[rng.random_range(0..UNITS.len())];
        *counter += 1;
        let im_page = sections[im_section].start_page;
        let im_id = builder.next_id(EntityKind::Metric, im_page);
        let im_code = format!("EM-{:03}a.{}", *counter, rng.random_range(1..=4));
        let im_label = format!("Synthetic Input {counter}");
        let model_id = builder.next_id(EntityKind::Model, cm_page);

        let cm = entity(
            cm_id.clone(),
            EntityKind::Metric,
            Some(MetricSubtype::CalculatedMetric),
            cm_label.clone(),
            "A derived disclosure computed from reported inputs.".into(),
            metric_properties(MetricSubtype::CalculatedMetric, unit, &cm_code),
        );
        let im = entity(
            im_id.clone(),
            EntityKind::Metric,
            Some(MetricSubtype::InputMetric),
            im_label.clone(),
            "A reported value consumed by a calculation.".into(),
            metric_properties(MetricSubtype::InputMetric, UNITS[rng.random_range(0..UNITS.len())], &im_code),
        );
        let mut model_props = BTreeMap::new();
        model_props.insert(
            "equation".into(),
            serde_json::json!(format!("{} = {} / scaling_factor", snake(&cm_label), snake(&im_label))),
        );
        model_props.insert("input_variables".into(), serde_json::json!([snake(&im_label)]));
        let model = entity(
            model_id.clone(),
            EntityKind::Model,
            None,
            format!("{cm_label} calculation"),
            format!("Derives {cm_label} from {im_label}."),
            model_props,
        );

        sections[cm_section].sentences.push(format!(
            "{cm_label} (code {cm_code}) is calculated from {im_label} and disclosed in {unit}."
        ));
        sections[im_section]
            .sentences
            .push(format!("{im_label} (code {im_code}) is reported as a calculation input."));

        sections[cm_section].relationships.push(rel(cm_category, Predicate::ConsistOf, &cm_id));
        sections[im_section].relationships.push(rel(im_category, Predicate::ConsistOf, &im_id));
        sections[cm_section].relationships.push(rel(&cm_id, Predicate::IsCalculatedBy, &model_id));
        sections[cm_section].relationships.push(rel(&model_id, Predicate::RequiresInputFrom, &im_id));
        homes.push((cm_id, cm_section, cm_category.to_string()));
        homes.push((im_id, im_section, im_category.to_string()));
        sections[cm_section].entities.push(cm);
        sections[im_section].entities.push(im);
        sections[cm_section].entities.push(model);
    };

    add_triple(
        &mut builder,
        &mut rng,
        &mut sections,
        1,
        &category_ids[0].clone(),
        2.min(category_count),
        &category_ids[1.min(category_ids.len() - 1)].clone(),
        &mut metric_counter,
        &mut metric_home,
    );

    while extra_slots > 0 {
        if extra_slots >= 3 && rng.random_bool(0.3) {
            let c = rng.random_range(0..category_count);
            let c2 = rng.random_range(0..category_count);
            add_triple(
                &mut builder,
                &mut rng,
                &mut sections,
                c + 1,
                &category_ids[c].clone(),
                c2 + 1,
                &category_ids[c2].clone(),
                &mut metric_counter,
                &mut metric_home,
            );
            extra_slots -= 3;
        } else {
            let c = rng.random_range(0..category_count);
            add_direct_metric(
                &mut builder,
                &mut rng,
                &mut sections,
                c + 1,
                &category_ids[c].clone(),
                &mut metric_counter,
                &mut metric_home,
            );
            extra_slots -= 1;
        }
    }

    // Ground truth, before duplicates and noise are layered on.
    let mut truth = KnowledgeGraph::new(Stage::Validated);
    for (i, section) in sections.iter().enumerate() {
        let segment_id = format!("seg_{:02}_{}", i + 1, section.number);
        let prov = provenance_for(section, &doc_id, &segment_id);
        for e in &section.entities {
            let mut e = e.clone();
            e.provenance = vec![prov.clone()];
            truth.entities.push(e);
        }
        for r in &section.relationships {
            let mut r = r.clone();
            r.provenance = vec![prov.clone()];
            truth.relationships.push(r);
        }
    }
    truth.sort_canonical();

    // Planted duplicates: at least one exact re-emission, plus random exact
    // or alias re-emissions in later sections.
    let mut dup_jobs: Vec<(usize, String, bool)> = Vec::new(); // (target section, metric id, alias?)
    if config.duplicate_probability > 0.0 {
        if let Some((m_id, _, _)) = metric_home.first() {
            dup_jobs.push((sections.len() - 1, m_id.clone(), false));
        }
    }
    for (m_id, home_section, _) in &metric_home {
        if *home_section + 1 < sections.len() && rng.random_bool(config.duplicate_probability / 2.0) {
            let later = rng.random_range(*home_section + 1..sections.len());
            dup_jobs.push((later, m_id.clone(), rng.random_bool(0.5)));
        }
    }
    for (target_section, metric_id, alias) in dup_jobs {
        let (_, home_idx, category_id) = metric_home
            .iter()
            .find(|(id, _, _)| *id == metric_id)
            .expect("planted metric exists")
            .clone();
        let original = sections[home_idx]
            .entities
            .iter()
            .find(|e| e.id == metric_id)
            .expect("metric in its home section")
            .clone();
        let mut copy = original.clone();
        if alias {
            // Same label and code, different id; suffixing keeps the
            // original the lexicographic minimum of the alias class.
            copy.id = format!("{}_v2", original.id);
            sections[target_section].relationships.push(rel(&category_id, Predicate::ConsistOf, &copy.id));
        } else {
            sections[target_section].relationships.push(rel(&category_id, Predicate::ConsistOf, &copy.id));
        }
        sections[target_section]
            .sentences
            .push(format!("{} is restated for convenience.", copy.label));
        sections[target_section].entities.push(copy);
    }

    // Dangling edges: references to ids no section ever defines.
    for k in 0..config.dangling_edges {
        let s = rng.random_range(1..sections.len());
        let undefined = format!("metric_{}_999_{:02}", slug, k + 1);
        let cat = category_ids[(s - 1).min(category_ids.len() - 1)].clone();
        sections[s].relationships.push(rel(&cat, Predicate::ConsistOf, &undefined));
    }

    // Bundle pages.
    let mut pages: Vec<Page> = Vec::new();
    pages.push(Page {
        number: 1,
        text: format!("{title}\n\nA synthetic regulatory disclosure document."),
        tables: vec![],
    });
    let mut toc_text = String::from("Contents\n");
    for section in &sections {
        toc_text.push_str(&format!(
            "{} {} ........ {}\n",
            section.number, section.title, section.start_page
        ));
    }
    pages.push(Page { number: 2, text: toc_text, tables: vec![] });
    for section in &sections {
        let span = (section.end_page - section.start_page + 1) as usize;
        let mut chunks: Vec<Vec<String>> = vec![Vec::new(); span];
        for (i, sentence) in section.sentences.iter().enumerate() {
            chunks[i % span].push(sentence.clone());
        }
        for (offset, chunk) in chunks.into_iter().enumerate() {
            let mut text = String::new();
            if offset == 0 {
                text.push_str(&format!("{} {}\n\n", section.number, section.title));
            }
            if chunk.is_empty() {
                text.push_str("(continued)");
            } else {
                text.push_str(&chunk.join("\n"));
            }
            pages.push(Page {
                number: section.start_page + offset as u32,
                text,
                tables: vec![],
            });
        }
    }
    let bundle = DocumentBundle { doc_id: doc_id.clone(), title: title.clone(), pages }
        .finalize()
        .expect("generated bundle is well-formed");

    let segments = segment_document(&bundle, &SegmenterConfig::default())
        .expect("generated bundle segments cleanly");
    assert_eq!(
        segments.segments.len(),
        sections.len(),
        "generator produced a TOC the segmenter reads differently"
    );

    let mut oracle = OracleTruth::default();
    for (segment, section) in segments.segments.iter().zip(&sections) {
        oracle.insert_segment(&segment.content, section_response(&doc_id, section));
    }

    SynthCase { doc_slug: slug, bundle, segments, oracle, truth }
}

fn snake(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

/// Structural graph equality: same entity ids with the same kind, subtype,
/// label and properties, and the same relationship triples. Provenance and
/// stage tags are ignored.
pub fn graphs_equivalent(actual: &KnowledgeGraph, expected: &KnowledgeGraph) -> Result<(), String> {
    let index_of = |g: &KnowledgeGraph| -> BTreeMap<String, Entity> {
        g.entities.iter().map(|e| (e.id.clone(), e.clone())).collect()
    };
    let a = index_of(actual);
    let b = index_of(expected);
    if a.len() != b.len() {
        return Err(format!("entity count {} != expected {}", a.len(), b.len()));
    }
    for (id, expected_entity) in &b {
        let Some(actual_entity) = a.get(id) else {
            return Err(format!("missing entity {id}"));
        };
        if actual_entity.kind != expected_entity.kind {
            return Err(format!("{id}: kind {:?} != {:?}", actual_entity.kind, expected_entity.kind));
        }
        if actual_entity.metric_subtype != expected_entity.metric_subtype {
            return Err(format!("{id}: subtype mismatch"));
        }
        if actual_entity.label != expected_entity.label {
            return Err(format!("{id}: label {:?} != {:?}", actual_entity.label, expected_entity.label));
        }
        if actual_entity.properties != expected_entity.properties {
            return Err(format!("{id}: properties differ"));
        }
    }
    let keys = |g: &KnowledgeGraph| -> std::collections::BTreeSet<String> {
        g.relationships.iter().map(Relationship::key).collect()
    };
    let ka = keys(actual);
    let kb = keys(expected);
    if ka != kb {
        let missing: Vec<_> = kb.difference(&ka).take(3).cloned().collect();
        let extra: Vec<_> = ka.difference(&kb).take(3).cloned().collect();
        return Err(format!("relationships differ; missing {missing:?}, extra {extra:?}"));
    }
    Ok(())
}
