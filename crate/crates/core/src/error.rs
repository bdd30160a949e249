use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A stream or instance file did not conform to its format.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The input is outside the regime an exhaustive routine accepts.
    #[error("refused: {0}")]
    Refused(String),

    /// An adjacency oracle broke its contract.
    #[error("oracle violation in {call} for advertiser {advertiser}: {message}")]
    OracleViolation {
        call: &'static str,
        advertiser: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
