use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure categories shared by every module; the CLI maps each onto an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("resource guard exceeded: {0}")]
    Resource(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("context rejected: {0}")]
    ContextRejected(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    /// Short machine-readable tag, used as the `reason` field of CLI reports.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Resource(_) => "resource",
            Error::Consistency(_) => "consistency",
            Error::TheoremViolation(_) => "theorem-violation",
            Error::ContextRejected(_) => "context-rejected",
            Error::Unsupported(_) => "unsupported",
        }
    }
}
