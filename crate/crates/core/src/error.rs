use std::path::PathBuf;

use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown prefix `{0}`")]
    UnknownPrefix(String),
    #[error("malformed CURIE or IRI `{0}`")]
    MalformedCurie(String),
    #[error("invalid prefix binding `{name}`: {reason}")]
    InvalidPrefix { name: String, reason: String },
    #[error("level {0} is out of range")]
    LevelOutOfRange(u32),
    #[error("model config field #{0} has neither `ckanField` nor `name`")]
    ConfigMissingKey(usize),
    #[error("unknown CKAN field `{0}`")]
    UnknownCkanField(String),
    #[error("duplicate field key `{0}`")]
    DuplicateFieldKey(String),
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("malformed document {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },
    #[error("missing `{0}`")]
    MissingId(String),
    #[error("CKAN package has no `name`")]
    MissingName,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("template syntax error at byte {position}: {reason}")]
    TemplateSyntax { position: usize, reason: String },
    #[error("unknown helper `{0}`")]
    UnknownHelper(String),
    #[error("template `{0}` has more than one multi-valued placeholder")]
    MultiValueAmbiguity(String),
    #[error("helper `{name}` failed: {reason}")]
    HelperFailure { name: String, reason: String },
    #[error("expanded value `{0}` is not a valid IRI")]
    InvalidIri(String),
    #[error("duplicate entry id `{0}`")]
    DuplicateId(String),
    #[error("unknown facet field `{0}`")]
    UnknownFacetField(String),
    #[error("file {path} holds entry `{found}`")]
    IdMismatch { path: PathBuf, found: String },
    #[error("unknown entry `{0}`")]
    UnknownEntry(String),
    #[error("catalogue is locked by another writer ({0})")]
    Locked(PathBuf),
    #[error("I/O failure on {path}: {reason}")]
    IoFailure { path: PathBuf, reason: String },
    #[error("save interrupted")]
    Interrupted,
    #[error("endpoint answered {status}: {excerpt}")]
    EndpointError { status: u16, excerpt: String },
    #[error("endpoint unreachable: {0}")]
    Transport(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::IoFailure {
            path: path.into(),
            reason: err.to_string(),
        }
    }
}
