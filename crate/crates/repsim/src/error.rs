//! Error types shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for representation, metric, statistics, and harness
/// operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite values in input ({context})")]
    NonFinite { context: String },

    #[error("matrix is numerically zero ({context})")]
    ZeroMatrix { context: String },

    #[error("shape mismatch: {left} vs {right} ({context})")]
    ShapeMismatch {
        left: String,
        right: String,
        context: String,
    },

    #[error("decomposition did not converge ({context})")]
    ConvergenceFailure { context: String },

    #[error("insufficient samples: n = {n} but max(p1, p2) = {p}; CCA requires n >= max(p1, p2)")]
    InsufficientSamples { n: usize, p: usize },

    #[error("projection weights sum underflowed; PWCCA is undefined")]
    DegenerateWeights,

    #[error("cannot delete {k} components from a representation with {p} rows")]
    RankOutOfRange { k: usize, p: usize },

    #[error("negative singular value {value} at index {index}")]
    NegativeSingularValue { index: usize, value: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate input: {context}")]
    DegenerateInput { context: String },

    #[error("too few samples: n = {n}, need at least {min}")]
    TooFewSamples { n: usize, min: usize },

    #[error("entries have mixed sample counts: {details}")]
    MixedSampleCounts { details: String },

    #[error("training diverged: {context}")]
    DivergenceDetected { context: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// File-format errors carry byte-offset or JSON-pointer diagnostics so a bad
/// file can be located without a hex editor.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes at offset {offset}: expected \\x93NUMPY")]
    BadMagic { offset: usize },

    #[error("unsupported npy version {major}.{minor} at offset {offset}")]
    UnsupportedVersion {
        major: u8,
        minor: u8,
        offset: usize,
    },

    #[error("unsupported dtype {descr:?} at offset {offset}: expected little-endian f4 or f8")]
    UnsupportedDtype { descr: String, offset: usize },

    #[error("array has {ndim} dimensions at offset {offset}: representations must be 2-D")]
    NotTwoDimensional { ndim: usize, offset: usize },

    #[error("malformed npy header at offset {offset}: {message}")]
    BadHeader { offset: usize, message: String },

    #[error("payload truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("unsupported report schema version {found} (this build reads {supported})")]
    SchemaVersion { found: u32, supported: u32 },

    #[error("invalid suite file at {pointer}: {message}")]
    SuiteValidation { pointer: String, message: String },

    #[error("invalid json at {pointer}: {message}")]
    Json { pointer: String, message: String },

    #[error("invalid scores csv at line {line}: {message}")]
    ScoresCsv { line: usize, message: String },
}

impl Error {
    /// Process exit code for the CLI: 2 for input/validation problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConvergenceFailure { .. }
            | Error::DegenerateWeights
            | Error::DivergenceDetected { .. }
            | Error::ZeroMatrix { .. } => 3,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
