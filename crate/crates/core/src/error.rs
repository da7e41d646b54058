use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("line {line}: invalid document {doc_id:?}: {reason}")]
    InvalidDocument {
        line: usize,
        doc_id: String,
        reason: String,
    },

    #[error("line {line}: invalid metadata record {meta_id:?}: {reason}")]
    InvalidMetadata {
        line: usize,
        meta_id: String,
        reason: String,
    },

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("duplicate metadata id {0:?}")]
    DuplicateMetadata(String),

    #[error("duplicate country {0} in territory map")]
    DuplicateCountry(String),

    #[error("invalid ISO 639-1 language code {0:?}")]
    InvalidLanguageCode(String),

    #[error("invalid ISO 3166-1 alpha-2 country code {0:?}")]
    InvalidCountryCode(String),

    #[error("language registry: {0}")]
    Registry(String),

    #[error("missing required input {0}")]
    MissingInput(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cell ({year}, {discipline}) has {available} documents, {needed} requested")]
    InsufficientCell {
        year: i32,
        discipline: String,
        needed: usize,
        available: usize,
    },

    #[error("line {line}: unknown {task} label {label:?}")]
    UnknownLabel {
        line: usize,
        task: String,
        label: String,
    },

    #[error("line {line}: duplicate label for doc {doc_id:?}, sentence {sentence_id}, reference {ref_index}")]
    DuplicateLabel {
        line: usize,
        doc_id: String,
        sentence_id: u64,
        ref_index: usize,
    },

    #[error("classifier {classifier:?} failed on sentence {sentence_id}: {reason}")]
    Classifier {
        classifier: String,
        sentence_id: u64,
        reason: String,
    },

    #[error("gold language {0} is not in the language registry")]
    UnknownGoldLanguage(String),

    #[error("unknown {kind} {name:?} (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("{kind} {name:?} needs {what}")]
    StrategyConfig {
        kind: &'static str,
        name: String,
        what: &'static str,
    },

    #[error("table row has {got} fields but the header has {expected}")]
    RaggedRow { expected: usize, got: usize },

    #[error("{skipped} of {lines} input lines were skipped, above the {limit_pct}% limit")]
    ValidationThreshold {
        skipped: u64,
        lines: u64,
        limit_pct: u64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
