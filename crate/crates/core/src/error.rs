use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:e})")]
    NonHermitian { max_asymmetry: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("negative probability {value:e}")]
    NegativeProbability { value: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("state too large: {n} ancillas of dimension {dim} (cap {cap})")]
    TooLarge { n: usize, dim: usize, cap: usize },

    #[error("bad subsystem: {0}")]
    BadSubset(String),

    #[error("invalid sweep config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("config parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unknown preset `{0}` (expected fig1, fig2 or fig3)")]
    UnknownPreset(String),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }
}
