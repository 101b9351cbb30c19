use thiserror::Error;

/// Errors raised by the exponent-sequence layer and by spec-string parsing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("index must be at least 1, got {0}")]
    ZeroIndex(usize),
    #[error("index {index} is outside the table of length {len} and no extension rule is set")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid window {lo}:{hi}: {reason}")]
    InvalidWindow { lo: usize, hi: usize, reason: &'static str },
    #[error("window contains no index with a positive value")]
    EmptyWindow,
    #[error("sequence is not nonnegative and nondecreasing at index {0}")]
    NotMonotone(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse '{input}': {reason}")]
    Parse { input: String, reason: String },
}

/// Errors raised while evaluating weights, elements and seminorms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("grade must be at least 1")]
    ZeroGrade,
    #[error("weight table has no entry at row {n}, grade {k}")]
    TableOutOfRange { n: usize, k: usize },
    #[error("not a Köthe matrix: {0}")]
    NotKothe(String),
    #[error("finite support reaches index {support} beyond truncation {truncation}")]
    TruncationTooSmall { support: usize, truncation: usize },
    #[error("finite support indices must be >= 1, strictly increasing and finite-valued")]
    BadSupport,
    #[error("envelope violated at index {index}: log|x| = {log_abs}, envelope = {envelope}")]
    EnvelopeViolated { index: usize, log_abs: f64, envelope: f64 },
    #[error("operation needs a finite-support element")]
    NeedsFiniteSupport,
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
}

/// Errors raised by the certification layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("codomain is not known to be Montel; compactness via the column criterion is unavailable")]
    NonMontel,
    #[error("operator kind {0} is not supported here")]
    UnsupportedOperator(&'static str),
    #[error("missing input for condition {condition}: {what}")]
    MissingInput { condition: &'static str, what: &'static str },
    #[error("gauge is not nondecreasing at grade {0}")]
    GaugeNotMonotone(usize),
    #[error("shift is not well defined: exponent sequence is not weakly stable at scale")]
    ShiftUndefined,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}
