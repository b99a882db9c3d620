use std::fmt;

/// Failure of a CLI run, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent flags.
    Usage(String),
    /// An axis triple too far from unit length to renormalize.
    NotUnit(String),
    /// The inputs violate a precondition of the requested analysis.
    Precondition(String),
    /// A replayed run did not reproduce its recorded checksums.
    ReplayMismatch(String),
    Io(std::io::Error),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NotUnit(_) => 3,
            CliError::Precondition(_) => 4,
            CliError::ReplayMismatch(_) => 5,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::NotUnit(m) => write!(f, "non-unit axis: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::ReplayMismatch(m) => write!(f, "replay mismatch: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<eprb_core::Error> for CliError {
    fn from(e: eprb_core::Error) -> Self {
        use eprb_core::Error as E;
        match e {
            E::NotUnit { .. } => CliError::NotUnit(e.to_string()),
            E::Precondition(m) => CliError::Precondition(m),
            E::Domain { .. } | E::UnsupportedModel { .. } => CliError::Usage(e.to_string()),
            E::SupportViolation { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
