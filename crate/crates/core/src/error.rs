use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant maps to a stable upper-case code (see [`Error::code`]) that the
/// command-line front end prints on standard error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt WAV header: {0}")]
    CorruptHeader(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("sample rate mismatch: expected {expected} Hz, found {found} Hz")]
    RateMismatch { expected: u32, found: u32 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("empty input")]
    EmptyInput,
    #[error("input too short: need at least {needed} samples, got {got}")]
    InputTooShort { needed: usize, got: usize },
    #[error("wrong frame length: expected {expected}, got {got}")]
    WrongFrameLength { expected: usize, got: usize },
    #[error("invalid cutoff {0} Hz: must be a multiple of 62.5 in [62.5, 500]")]
    InvalidCutoff(f64),
    #[error("invalid band [{lo}, {hi}] Hz")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("classification targets must be 0 or 1, found {0}")]
    NonBinaryLabels(f64),
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("feature length mismatch: model expects {expected}, got {got}")]
    FeatureLengthMismatch { expected: usize, got: usize },
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: i64 },
    #[error("malformed model file: {0}")]
    MalformedModelFile(String),
    #[error("model file not found: {}", .0.display())]
    ModelNotFound(PathBuf),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite prediction at position {0}")]
    NonFinitePrediction(usize),
    #[error("truth values have zero variance")]
    ZeroVariance,
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotFound(_) => "NOT_FOUND",
            Error::UnsupportedFormat(_) => "UNSUPPORTED_FORMAT",
            Error::CorruptHeader(_) => "CORRUPT_HEADER",
            Error::Io(_) => "IO_ERROR",
            Error::RateMismatch { .. } => "RATE_MISMATCH",
            Error::InvalidSpec(_) => "INVALID_SPEC",
            Error::EmptyInput => "EMPTY_INPUT",
            Error::InputTooShort { .. } => "INPUT_TOO_SHORT",
            Error::WrongFrameLength { .. } => "WRONG_FRAME_LENGTH",
            Error::InvalidCutoff(_) => "INVALID_CUTOFF",
            Error::InvalidBand { .. } => "INVALID_BAND",
            Error::TooFewSamples { .. } => "TOO_FEW_SAMPLES",
            Error::NonBinaryLabels(_) => "NON_BINARY_LABELS",
            Error::NonFiniteFeature { .. } => "NON_FINITE_FEATURE",
            Error::FeatureLengthMismatch { .. } => "FEATURE_LENGTH_MISMATCH",
            Error::VersionMismatch { .. } => "VERSION_MISMATCH",
            Error::MalformedModelFile(_) => "MALFORMED_MODEL_FILE",
            Error::ModelNotFound(_) => "MODEL_NOT_FOUND",
            Error::ModelMismatch(_) => "MODEL_MISMATCH",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::NonFinitePrediction(_) => "NON_FINITE_PREDICTION",
            Error::ZeroVariance => "ZERO_VARIANCE",
            Error::MalformedCsv(_) => "MALFORMED_CSV",
        }
    }
}
