use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus: no tokens to build a vocabulary from")]
    EmptyCorpus,

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("co-occurrence matrix has a zero grand total")]
    ZeroGrandTotal,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch in {context}: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("gradient descent diverged at iteration {iteration} (loss is not finite)")]
    Divergence { iteration: usize },

    #[error("normal equations are singular; use a regularization weight lambda > 0")]
    Singular,

    #[error("need at least {required} scorable pairs, found {found}")]
    TooFewPairs { found: usize, required: usize },

    #[error("correlation is undefined for a constant input list")]
    UndefinedCorrelation,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("missing {kind}: {name}")]
    MissingResource { kind: &'static str, name: String },

    #[error("no holistic vector stored for phrase `{verb} {object}`")]
    HolisticMiss { verb: String, object: String },

    #[error("missing holistic vectors for: {}", .0.join(", "))]
    MissingHolistic(Vec<String>),

    #[error("verb `{0}` has no usable occurrences")]
    NoUsableOccurrences(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("artifact {artifact} was produced by config {found}, current config is {expected}")]
    ConfigHashMismatch {
        artifact: String,
        expected: String,
        found: String,
    },

    #[error("infeasible synthetic spec: {0}")]
    Infeasible(String),
}

impl Error {
    pub fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through file context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { source, .. } => source.root(),
            other => other,
        }
    }
}
