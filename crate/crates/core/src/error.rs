use thiserror::Error;

/// Errors raised by the library. Budget exhaustion inside decision
/// procedures is a verdict, not an error, and never shows up here.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input document could not be read as an automaton.
    #[error("parse error{}: {message}", position.map(|(l, c)| format!(" at line {l}, column {c}")).unwrap_or_default())]
    Parse {
        message: String,
        position: Option<(usize, usize)>,
    },

    /// A state, letter or generator outside the automaton.
    #[error("input out of domain: {0}")]
    Domain(String),

    /// A structural invariant of the automaton is violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The operation needs a property the input does not have
    /// (invertibility, reset, polynomial activity, ...).
    #[error("capability missing: {0}")]
    Capability(String),

    /// A construction would exceed its configured size cap.
    #[error("{what} would have size {size}, above the cap {cap}")]
    Size { what: &'static str, size: u128, cap: u128 },

    /// A rejection sampler gave up.
    #[error("sampling exhausted after {rejects} rejections")]
    SamplingExhausted { rejects: u64 },

    /// Two independent computations disagreed.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            message: message.into(),
            position: None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
