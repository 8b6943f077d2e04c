use std::path::PathBuf;

/// Errors produced by the solver, the diagnostics and the scenario harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("simulation diverged at step {step} (t = {t}): {reason}")]
    Diverged { step: usize, t: f64, reason: String },

    #[error("functional {kind} is not defined for the {model} model")]
    IncompatibleKind { kind: String, model: String },

    #[error("weight {0} depends on time; a static weight is required here")]
    TimeDependentWeight(String),

    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },

    #[error("records are not uniformly spaced in time (expected stride {expected}, found {found})")]
    NonUniformRecords { expected: f64, found: f64 },

    #[error("no undershoot/overshoot bracket found for origin slopes in [{lo}, {hi}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("soliton core under-resolved: spacing {h} exceeds {limit} for alpha = {alpha}")]
    UnderResolved { h: f64, limit: f64, alpha: f64 },

    #[error("nonpositive value {value} at t = {t} inside the fit window")]
    NonPositiveInWindow { t: f64, value: f64 },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    #[error("malformed snapshot {path}: {message}")]
    MalformedSnapshot { path: PathBuf, message: String },

    #[error("snapshot grid mismatch: metadata says {expected} cells, file has {found} rows")]
    GridMismatch { expected: usize, found: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
