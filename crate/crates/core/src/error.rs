use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (failed at pivot {pivot}, jitter schedule exhausted)")]
    NotPositiveDefinite { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("argument outside supported domain: {0}")]
    Domain(String),

    #[error("correlation stays above the threshold over the whole bracket")]
    Unbounded,

    #[error("bad bracket: {0}")]
    BadBracket(String),

    #[error("model and data kinds do not match: {0}")]
    KindMismatch(String),

    #[error("split scheme is incompatible with the dataset: {0}")]
    IncompatibleScheme(String),

    #[error("{n} rows exceed the dense cap of {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("variable index {0} out of range (expected 1 or 2)")]
    VariableIndexOutOfRange(usize),

    #[error("empty input")]
    EmptyInput,

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("row keys do not match: {0}")]
    KeyMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("conditional variance {0:e} is negative beyond round-off")]
    NegativeVariance(f64),

    #[error("unsupported dataset kind: {0}")]
    UnsupportedKind(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag, used in `error:<code>:` lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Domain(_) => "domain",
            Error::Unbounded => "unbounded",
            Error::BadBracket(_) => "bad_bracket",
            Error::KindMismatch(_) => "kind_mismatch",
            Error::IncompatibleScheme(_) => "incompatible_scheme",
            Error::DenseCapExceeded { .. } => "dense_cap_exceeded",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::VariableIndexOutOfRange(_) => "variable_index_out_of_range",
            Error::EmptyInput => "empty_input",
            Error::DuplicateName(_) => "duplicate_name",
            Error::KeyMismatch(_) => "key_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NegativeVariance(_) => "negative_variance",
            Error::UnsupportedKind(_) => "unsupported_kind",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}
