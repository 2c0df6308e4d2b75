//! Command implementations. Each per-stage command reads one artifact,
//! writes the next one with the input's hash in its header, and prints a
//! short summary; `pipeline` chains them and stops at the first fatal
//! error, leaving completed artifacts in place.

use std::path::{Path, PathBuf};

use esgkg::artifact::{
    load_report, render_report, sha256_of_file, write_atomic, ExtractionFile, GraphFile,
    GraphMeta, MetricsFile, MetricsRecord, ReportSummary, SegmentFile, SCHEMA_VERSION,
};
use esgkg::backend::{CompletionBackend, LiveBackend, OracleBackend, OracleTruth, RecordingBackend, ReplayBackend};
use esgkg::bundle::DocumentBundle;
use esgkg::consolidation::consolidate;
use esgkg::extraction::{extract_document, ExtractError, ExtractionOptions, PromptTemplates};
use esgkg::metrics::ExtractedCounts;
use esgkg::ontology::OntologySchema;
use esgkg::segmenter::segment_document;
use esgkg::synth::{generate_case, SynthConfig};
use esgkg::validation::{validate_graph, ValidationOptions};

use crate::config::{BackendKind, PipelineConfig};
use crate::export;
use crate::CliError;

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn build_backend(config: &PipelineConfig) -> Result<Box<dyn CompletionBackend>, CliError> {
    match config.backend.kind {
        BackendKind::Live => {
            if config.backend.endpoint.trim().is_empty() {
                return Err(CliError::Input("live backend needs backend.endpoint".into()));
            }
            let live = LiveBackend::from_env(&config.backend.endpoint, &config.backend.api_key_env)
                .map_err(|e| CliError::Backend(e.to_string()))?;
            match &config.backend.record_dir {
                Some(dir) => Ok(Box::new(RecordingBackend::new(live, dir.clone()))),
                None => Ok(Box::new(live)),
            }
        }
        BackendKind::Replay => {
            let dir = config
                .backend
                .replay_dir
                .as_ref()
                .ok_or_else(|| CliError::Input("replay backend needs backend.replay_dir".into()))?;
            Ok(Box::new(ReplayBackend::new(dir.clone())))
        }
        BackendKind::Oracle => {
            let path = config
                .backend
                .truth_path
                .as_ref()
                .ok_or_else(|| CliError::Input("oracle backend needs backend.truth_path".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let truth: OracleTruth = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{} is not a truth file: {e}", path.display())))?;
            Ok(Box::new(OracleBackend::new(truth)))
        }
    }
}

fn prompt_templates(config: &PipelineConfig) -> Result<PromptTemplates, CliError> {
    match &config.few_shot_path {
        None => Ok(PromptTemplates::default()),
        Some(path) => {
            let few_shot = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Ok(PromptTemplates { few_shot })
        }
    }
}

pub fn cmd_segment(bundle_path: &Path, out_path: &Path, config: &PipelineConfig) -> Result<(), CliError> {
    let input_sha = sha256_of_file(bundle_path).map_err(input_err)?;
    let bundle = DocumentBundle::load(bundle_path).map_err(input_err)?;
    let pages = bundle.last_page();
    let document = segment_document(&bundle, &config.segmentation).map_err(input_err)?;

    println!("{} segments from {} ({} pages, TOC on page {})", document.segments.len(), document.doc_id, pages, document.toc_page);
    println!("{:<14} {:>11}  title", "segment", "pages");
    for segment in &document.segments {
        let (start, end) = segment.page_range;
        let span = if end < start { "-".to_string() } else { format!("{start}-{end}") };
        println!("{:<14} {:>11}  {}", segment.id, span, segment.title);
    }
    for warning in &document.warnings {
        println!("warning: {warning}");
    }

    SegmentFile::new(document, input_sha).save(out_path).map_err(input_err)?;
    println!("wrote {}", out_path.display());
    Ok(())
}

pub fn cmd_extract(segments_path: &Path, config: &PipelineConfig, out_path: &Path) -> Result<(), CliError> {
    let input_sha = sha256_of_file(segments_path).map_err(input_err)?;
    let segment_file = SegmentFile::load(segments_path).map_err(input_err)?;
    let backend = build_backend(config)?;
    let options = ExtractionOptions {
        mode: config.mode()?,
        llm: config.llm_params(),
        parallelism: config.parallelism,
        templates: prompt_templates(config)?,
    };
    let schema = OntologySchema::esgmkg();
    let extraction = match extract_document(&segment_file.document, backend.as_ref(), &schema, &options) {
        Ok(extraction) => extraction,
        Err(e @ ExtractError::AllSegmentsFailed(_)) => return Err(CliError::Backend(e.to_string())),
        Err(e) => return Err(input_err(e)),
    };

    println!(
        "extracted {} entities, {} relationships from {} segments ({} failed) in mode {}",
        extraction.entity_count(),
        extraction.relationship_count(),
        extraction.results.len(),
        extraction.failures.len(),
        extraction.mode.as_str(),
    );
    println!(
        "token usage: {} input, {} output",
        extraction.token_usage.input, extraction.token_usage.output
    );
    for failure in &extraction.failures {
        println!("failed segment {}: {}", failure.segment_id, failure.error);
    }

    ExtractionFile::new(extraction, backend.name(), input_sha).save(out_path).map_err(input_err)?;
    println!("wrote {}", out_path.display());
    Ok(())
}

pub fn cmd_consolidate(extraction_path: &Path, out_path: &Path) -> Result<(), CliError> {
    let input_sha = sha256_of_file(extraction_path).map_err(input_err)?;
    let extraction_file = ExtractionFile::load(extraction_path).map_err(input_err)?;
    let raw_counts = extraction_file.raw_counts();
    let extraction = extraction_file.extraction;
    let (graph, log) = consolidate(&extraction.results);

    println!(
        "consolidated {} -> {} entities, {} -> {} relationships ({} aliases, {} warnings)",
        raw_counts.entities,
        graph.entity_count(),
        raw_counts.relationships,
        graph.relationship_count(),
        log.resolution_map.len(),
        log.warnings.len(),
    );

    let file = GraphFile {
        schema_version: SCHEMA_VERSION,
        input_sha256: input_sha,
        generated_at: esgkg::artifact::reproducible_timestamp(),
        meta: GraphMeta {
            doc_id: extraction.doc_id.clone(),
            doc_title: extraction.doc_title.clone(),
            mode: extraction.mode,
            model: extraction.model.clone(),
            raw_counts,
            stage2_tokens: extraction.token_usage,
        },
        graph,
        resolution_map: log.resolution_map,
        warnings: log.warnings,
    };
    file.save(out_path).map_err(input_err)?;
    println!("wrote {}", out_path.display());
    Ok(())
}

pub fn cmd_validate(graph_path: &Path, config: &PipelineConfig, out_dir: &Path) -> Result<(), CliError> {
    let input_sha = sha256_of_file(graph_path).map_err(input_err)?;
    let graph_file = GraphFile::load(graph_path).map_err(input_err)?;
    let backend = build_backend(config)?;
    let schema = OntologySchema::esgmkg();
    let options = ValidationOptions { llm: config.llm_params(), parallelism: config.parallelism };

    let (validated, report) = validate_graph(&graph_file.graph, backend.as_ref(), &schema, &options);

    println!(
        "validated {} -> {} entities, {} -> {} relationships ({} semantic calls)",
        report.input_counts.entities,
        report.output_counts.entities,
        report.input_counts.relationships,
        report.output_counts.relationships,
        report.semantic_calls,
    );
    for (rule, pass) in &report.per_rule_pass {
        println!("{rule}: {}/{} passed", pass.passed, pass.total);
    }

    std::fs::create_dir_all(out_dir).map_err(input_err)?;
    let validated_path = out_dir.join("validated.json");
    let report_path = out_dir.join("validation_report.jsonl");
    let metrics_path = out_dir.join("metrics_summary.json");

    let validated_file = GraphFile {
        schema_version: SCHEMA_VERSION,
        input_sha256: input_sha.clone(),
        generated_at: esgkg::artifact::reproducible_timestamp(),
        meta: graph_file.meta.clone(),
        graph: validated,
        resolution_map: Default::default(),
        warnings: report.warnings.clone(),
    };
    validated_file.save(&validated_path).map_err(input_err)?;

    let summary = ReportSummary::from_report(&report, &graph_file.meta, input_sha);
    let prices = config.price_table();
    let (metrics, ledger) = summary.score(&prices).map_err(input_err)?;
    let record = MetricsRecord {
        doc_id: summary.doc_id.clone(),
        mode: summary.mode,
        model: summary.model.clone(),
        price_table_version: prices.version.clone(),
        metrics,
        ledger,
    };
    let report_text = render_report(&report, &summary, Some(&record));
    write_atomic(&report_path, &report_text).map_err(input_err)?;
    let report_sha = sha256_of_file(&report_path).map_err(input_err)?;
    MetricsFile::new(record.clone(), report_sha).save(&metrics_path).map_err(input_err)?;

    println!(
        "semantic accuracy {:.1}%, schema compliance {:.1}%, relationship retention {:.1}%",
        record.metrics.semantic_accuracy,
        record.metrics.schema_compliance,
        record.metrics.relationship_retention,
    );
    match record.metrics.cost_per_entity {
        Some(cost) => println!(
            "cost per entity ${cost:.4}, waste ratio {:.1}% (prices {})",
            record.metrics.cost_waste_ratio, record.price_table_version
        ),
        None => println!(
            "cost per entity: no validated entities; waste ratio {:.1}%",
            record.metrics.cost_waste_ratio
        ),
    }
    println!("wrote {}", validated_path.display());
    println!("wrote {}", report_path.display());
    println!("wrote {}", metrics_path.display());
    Ok(())
}

pub fn cmd_pipeline(bundle_path: &Path, config: &PipelineConfig, out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(input_err)?;
    let segments_path = out_dir.join("segments.json");
    let extraction_path = out_dir.join("extraction.json");
    let consolidated_path = out_dir.join("consolidated.json");

    println!("== stage 1: segmentation ==");
    cmd_segment(bundle_path, &segments_path, config)?;
    println!("== stage 2: extraction ==");
    cmd_extract(&segments_path, config, &extraction_path)?;
    println!("== stage 2b: consolidation ==");
    cmd_consolidate(&extraction_path, &consolidated_path)?;
    println!("== stage 3: validation ==");
    cmd_validate(&consolidated_path, config, out_dir)?;
    Ok(())
}

pub fn cmd_export(graph_path: &Path, format: &str, out_path: &Path) -> Result<(), CliError> {
    let file = GraphFile::load(graph_path).map_err(input_err)?;
    let rendered = match format {
        "native" => export::to_native(&file),
        "triples" => export::to_triples(&file.graph),
        other => return Err(CliError::Input(format!("unknown export format {other:?}"))),
    };
    write_atomic(out_path, &rendered).map_err(input_err)?;
    println!("wrote {} ({format})", out_path.display());
    Ok(())
}

pub fn cmd_synth(seed: u64, out_dir: &Path) -> Result<(), CliError> {
    let case = generate_case(&SynthConfig::seeded(seed));
    std::fs::create_dir_all(out_dir).map_err(input_err)?;
    let bundle_path = out_dir.join("bundle.json");
    let truth_path = out_dir.join("truth.json");
    let expected_path = out_dir.join("expected_graph.json");
    let config_path = out_dir.join("config.toml");

    write_atomic(&bundle_path, &(serde_json::to_string_pretty(&case.bundle).unwrap() + "\n"))
        .map_err(input_err)?;
    write_atomic(&truth_path, &(serde_json::to_string_pretty(&case.oracle).unwrap() + "\n"))
        .map_err(input_err)?;
    write_atomic(&expected_path, &(serde_json::to_string_pretty(&case.truth).unwrap() + "\n"))
        .map_err(input_err)?;

    let config_text = format!(
        "mode = \"ontology\"\nparallelism = 2\n\n[backend]\nkind = \"oracle\"\nmodel = \"oracle\"\ntruth_path = \"{}\"\n\n[pricing]\nversion = \"demo\"\n\n[pricing.models.oracle]\ninput_per_mtok = 3.0\noutput_per_mtok = 15.0\n",
        truth_path.display()
    );
    write_atomic(&config_path, &config_text).map_err(input_err)?;

    println!(
        "synthesized {} ({} pages, {} segments, {} entities, {} relationships)",
        case.doc_slug,
        case.bundle.last_page(),
        case.segments.segments.len(),
        case.truth.entity_count(),
        case.truth.relationship_count(),
    );
    println!("wrote {}", bundle_path.display());
    println!("wrote {}", truth_path.display());
    println!("wrote {}", expected_path.display());
    println!("wrote {}", config_path.display());
    println!(
        "run: esgkg pipeline {} --config {} --out {}",
        bundle_path.display(),
        config_path.display(),
        out_dir.join("run").display()
    );
    Ok(())
}

/// Re-parses a written report and recomputes the metrics record from its
/// summary; used by `validate --check` style verification and tests.
pub fn recompute_metrics(report_path: &Path, config: &PipelineConfig) -> Result<MetricsRecord, CliError> {
    let parsed = load_report(report_path).map_err(input_err)?;
    let prices = config.price_table();
    let (metrics, ledger) = parsed.summary.score(&prices).map_err(input_err)?;
    Ok(MetricsRecord {
        doc_id: parsed.summary.doc_id.clone(),
        mode: parsed.summary.mode,
        model: parsed.summary.model.clone(),
        price_table_version: prices.version,
        metrics,
        ledger,
    })
}

/// Raw counts recorded in an extraction artifact, for tests and tooling.
pub fn extraction_counts(path: &Path) -> Result<ExtractedCounts, CliError> {
    Ok(ExtractionFile::load(path).map_err(input_err)?.raw_counts())
}

pub fn default_artifact_paths(out_dir: &Path) -> Vec<PathBuf> {
    [
        "segments.json",
        "extraction.json",
        "consolidated.json",
        "validated.json",
        "validation_report.jsonl",
        "metrics_summary.json",
    ]
    .iter()
    .map(|name| out_dir.join(name))
    .collect()
}
