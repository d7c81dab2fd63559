use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabets do not match")]
    MismatchedAlphabets,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("problem too large: {what} needs {required}, cap is {cap}")]
    TooLarge {
        what: String,
        required: f64,
        cap: f64,
    },
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("target output is not reachable through the channel")]
    InfeasibleTarget,
    #[error("empty conditioning slice")]
    EmptySlice,
}

impl Error {
    pub(crate) fn too_large(what: &str, required: f64, cap: f64) -> Self {
        Error::TooLarge {
            what: what.to_string(),
            required,
            cap,
        }
    }

    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MismatchedAlphabets => "MismatchedAlphabets",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::TooLarge { .. } => "TooLarge",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::InfeasibleTarget => "InfeasibleTarget",
            Error::EmptySlice => "EmptySlice",
        }
    }
}
