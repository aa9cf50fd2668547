use thiserror::Error;

/// Errors raised by the exact Takagi machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input lies outside the domain of an operation (usually `[0, 1]`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Text could not be parsed as a rational or a binary expansion.
    #[error("parse error: {0}")]
    Parse(String),

    /// A non-dyadic rational was asked for its `1^∞`-tailed expansion.
    #[error("no terminating expansion: {0} is not a dyadic rational")]
    NoTerminatingExpansion(String),

    /// A block index past the end of a finite block decomposition.
    #[error("block index {index} out of range ({len} blocks)")]
    IndexOutOfRange { index: usize, len: usize },

    /// An enumeration or sampling request exceeded its configured cap.
    #[error("resource cap exceeded: {what} requires {requested}, cap is {cap}")]
    Resource {
        what: &'static str,
        requested: String,
        cap: String,
    },

    /// The level coincides with a sampled ordinate; perturb it and retry.
    #[error("degenerate level {0}: it equals a sampled value, perturb it (e.g. by 2^-(depth+5))")]
    DegenerateLevel(String),

    /// A monotone approximating sequence was requested where none exists.
    #[error("no such sequence exists: {0}")]
    NoSuchSequence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
