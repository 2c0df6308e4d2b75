//! Knowledge-graph construction from ESG regulatory documents.
//!
//! A three-stage pipeline turns a page-structured document bundle into a
//! validated, provenance-preserving knowledge graph:
//!
//! 1. [`segmenter`]: table-of-contents aligned segmentation with table
//!    merging and text cleanup.
//! 2. [`extraction`]: schema-constrained prompt extraction through a
//!    pluggable completion [`backend`], then three-pass [`consolidation`]
//!    into one graph.
//! 3. [`validation`]: semantic type verification plus six rule-based
//!    validators, with full violation logging.
//!
//! [`metrics`] scores a finished run (accuracy, compliance, retention and
//! cost); [`ontology`] holds the compiled-in ESGMKG schema that prompts and
//! validators share; [`artifact`] defines the hash-chained files each stage
//! writes; [`synth`] generates ground-truth corpora for end-to-end
//! verification against the [`backend::OracleBackend`].

pub mod artifact;
pub mod backend;
pub mod bundle;
pub mod consolidation;
pub mod extraction;
pub mod graph;
pub mod metrics;
pub mod ontology;
pub mod segmenter;
pub mod synth;
pub mod validation;

pub use backend::{CompletionBackend, LlmParams, TokenUsage};
pub use extraction::{ExtractionMode, ExtractionOptions};
pub use graph::{Entity, KnowledgeGraph, Provenance, Relationship, Stage};
pub use ontology::{EntityKind, MetricSubtype, OntologySchema, Predicate};
pub use segmenter::{Segment, SegmentedDocument, SegmenterConfig};
pub use validation::{ValidationOptions, ValidationReport};
