use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: invalid field `{field}`: {reason}")]
    MalformedRow {
        line: usize,
        field: &'static str,
        reason: String,
    },

    #[error("template registry: {0}")]
    Templates(String),

    #[error("no templates registered for relation {0}")]
    MissingTemplates(String),

    #[error("text is empty after normalization: {0:?}")]
    EmptyText(String),

    #[error(
        "relation {relation}: need {required} distinct negatives, only {available} admissible"
    )]
    InsufficientNegatives {
        relation: String,
        required: usize,
        available: usize,
    },

    #[error("token lists differ ({context}): {left:?} vs {right:?}")]
    TokenMismatch {
        context: String,
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("invalid token probabilities: {0}")]
    InvalidTokenProbs(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("manifest/result mismatch: {0}")]
    Mismatch(String),

    #[error("key sets differ: only in first {only_a:?}, only in second {only_b:?}")]
    KeyMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("missing coverage for (model, relation) pairs: {0:?}")]
    Coverage(Vec<(String, String)>),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("missing series: {0}")]
    MissingSeries(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
