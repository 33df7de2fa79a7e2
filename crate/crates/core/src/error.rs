use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("constructor `{kind}` cannot be used on this graph: {reason}")]
    IncompatibleGraph { kind: String, reason: String },

    #[error("graph is disconnected ({components} components); the stationary distribution is undefined")]
    Disconnected { components: usize },

    #[error("node {0} has zero strength")]
    IsolatedNode(usize),

    #[error("graph has {n} nodes, above the dense matrix exponential threshold of {threshold}; use a linearized constructor")]
    TooLarge { n: usize, threshold: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("constructor output violates its invariants: {0}")]
    ConstructorInvariant(String),

    #[error("constructor name `{0}` is already registered")]
    DuplicateConstructor(String),

    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),

    #[error("not supported: {0}")]
    NotSupported(String),

    #[error("partition enumeration is limited to {max} nodes, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("unsupported results version {found} (expected {expected})")]
    Version { found: u64, expected: u64 },

    #[error("corrupt results file: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Input,
    Numeric,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidConfig(_)
            | Error::UnknownConstructor(_)
            | Error::DuplicateConstructor(_)
            | Error::NotSupported(_) => ErrorCategory::Config,
            Error::Parse { .. }
            | Error::InvalidGraph(_)
            | Error::IncompatibleGraph { .. }
            | Error::Disconnected { .. }
            | Error::IsolatedNode(_)
            | Error::TooLarge { .. }
            | Error::Version { .. }
            | Error::Corrupt(_) => ErrorCategory::Input,
            Error::DimensionMismatch { .. }
            | Error::NonFinite(_)
            | Error::NonConvergence { .. }
            | Error::ConstructorInvariant(_)
            | Error::EnumerationTooLarge { .. } => ErrorCategory::Numeric,
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}
