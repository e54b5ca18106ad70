use thiserror::Error;

/// Errors surfaced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("feature arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("uncovered utterance {0}: no body-memory ticks inside its window")]
    UncoveredUtterance(String),
    #[error("participant mismatch: lexicon belongs to {expected}, entry from {found}")]
    ParticipantMismatch { expected: String, found: String },
    #[error("unknown word: {0}")]
    UnknownWord(String),
    #[error("overlapping pushes: [{0}, {1}] and [{2}, {3}]")]
    OverlappingPushes(f64, f64, f64, f64),
    #[error("invalid interval: start {0} must precede end {1}")]
    InvalidInterval(f64, f64),
    #[error("no negative productions")]
    NoNegativeProductions,
    #[error("session index {0} outside 1..=5")]
    SessionIndex(u8),
    #[error("statistics: {0}")]
    Stats(String),
    #[error("missing fixture table(s): {0}")]
    MissingFixture(String),
    #[error("fixture {file}:{line}: {msg}")]
    FixtureFormat { file: String, line: usize, msg: String },
    #[error("{path}:{line}: {source}")]
    Record {
        path: String,
        line: usize,
        source: serde_json::Error,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
