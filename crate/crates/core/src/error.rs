use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    /// A matrix that must be inverted or factorised is too close to singular.
    #[error("numerical conditioning failure: {0}")]
    Conditioning(String),

    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} of size {size} exceeds the supported cap {cap}")]
    SizeExceeded { what: &'static str, size: usize, cap: usize },

    #[error("low-rank kernel supports rank <= {max}, got {rank}")]
    UnsupportedRank { rank: usize, max: usize },

    #[error("sampling hit a zero-probability prefix after {retries} retries")]
    ZeroProbability { retries: usize },

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by asking an oracle or kernel for more than it supports.
    pub fn is_scale_error(&self) -> bool {
        matches!(self, Error::SizeExceeded { .. } | Error::UnsupportedRank { .. })
    }

    /// True for numerical failures (singular matrices, underflowed probabilities).
    pub fn is_numerical_error(&self) -> bool {
        matches!(self, Error::Conditioning(_) | Error::ZeroProbability { .. } | Error::Domain(_))
    }
}
