use thiserror::Error;

/// CLI failures, each tied to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    /// 1 for usage and runtime errors, 2 for infeasible instances.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Usage(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<bgraph::Error> for CliError {
    fn from(e: bgraph::Error) -> Self {
        use bgraph::Error as E;
        match e {
            E::Infeasible(_) | E::EmptyModel => CliError::Infeasible(e.to_string()),
            E::IndexOutOfRange { .. }
            | E::DuplicateIndex(_)
            | E::InvalidSubgraph(_)
            | E::InvalidPairing(_)
            | E::InvalidSite(_)
            | E::OutOfRange(_)
            | E::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
