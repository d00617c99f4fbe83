use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u32 },

    #[error("line {line}: cannot parse {token:?}")]
    Parse { line: usize, token: String },

    #[error("invalid family specification: {0}")]
    InvalidFamily(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configured size limit was exceeded. Callers should route to a
    /// cheaper method (closed form, Monte Carlo) rather than retry.
    #[error("capability limit exceeded: {0}")]
    Capability(String),

    /// The count has zero variance (no copies, or a forced value).
    #[error("degenerate variance: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_capability(&self) -> bool {
        matches!(self, Error::Capability(_))
    }

    /// Short machine-readable tag used in JSON error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SelfLoop { .. } | Error::Parse { .. } => "parse",
            Error::InvalidFamily(_) | Error::InvalidPattern(_) | Error::InvalidArgument(_) => {
                "usage"
            }
            Error::Capability(_) => "capability",
            Error::Degenerate(_) => "degenerate",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
