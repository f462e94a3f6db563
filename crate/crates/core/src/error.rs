use thiserror::Error;

/// Errors raised by construction and evaluation routines.
///
/// `Domain` covers inputs outside the region where a quantity is defined or
/// where the engine is willing to evaluate it (divergent series, `Re(z) < 1`,
/// non-primitive characters). `Invalid` covers malformed arguments.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{atom}: {source}")]
    Atom {
        atom: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for domain-type failures, looking through atom wrappers.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Domain(_) | Error::Budget(_) => true,
            Error::Atom { source, .. } => source.is_domain(),
            Error::Invalid(_) => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
