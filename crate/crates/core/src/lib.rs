//! Dataset metadata maturity engine.
//!
//! The crate encodes a six-level maturity model for urban dataset metadata
//! and builds everything else on top of it:
//!
//! * [`model`]: categories, levels, property bindings and the prefix map,
//!   plus the JSON model configuration loader.
//! * [`record`]: catalogue entries, typed values and per-value validation.
//! * [`scoring`]: per-entry completion fractions and corpus statistics.
//! * [`fairness`]: FAIR indicator tiers and DCAT-AP conformance.
//! * [`mapping`]: template-driven conversion of entries to RDF.
//! * [`rdf`]: graph model, N-Triples/Turtle writers, SPARQL Update scripts
//!   and an endpoint client.
//! * [`search`]: in-process BM25 text index with result-scoped facets.
//! * [`store`]: directory-backed catalogue, sync ledger and CKAN import.
//! * [`synth`]: deterministic synthetic corpora with prescribed fill rates.

pub mod error;
pub mod fairness;
pub mod mapping;
pub mod model;
pub mod rdf;
pub mod record;
pub mod scoring;
pub mod search;
pub mod store;
pub mod synth;

pub use error::{Error, Result};

pub use model::{builtin_model, load_model_config, resolve_curie, Category, MaturityModel, PrefixMap, PropertySpec, ValueRange};

pub use record::{parse_entry, validate_entry, validate_value, CatalogueEntry, Value};
pub use mapping::{map_entry, parse_mapping, EvalContext, MappingConfig, UuidMode};
pub use rdf::{Graph, Term, Triple};
pub use scoring::{completion, corpus_report, CompletionReport, CorpusReport, Fraction};
pub use store::Catalogue;


