use thiserror::Error;

/// Failures of a subcommand, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags.
    #[error("{0}")]
    Input(String),
    /// The algorithm ran and could not produce an answer.
    #[error("{0}")]
    Algorithm(lowdeg::Error),
    /// The check ran to completion and its verdict is negative.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Algorithm(_) | CliError::Check(_) => 2,
        }
    }
}

impl From<lowdeg::Error> for CliError {
    /// Errors about the data or the flags are input errors; the rest are
    /// algorithm failures.
    fn from(e: lowdeg::Error) -> Self {
        use lowdeg::Error as E;
        match e.root() {
            E::InvalidInput(_) | E::DimensionMismatch { .. } | E::NotDistinct { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Algorithm(e),
        }
    }
}
