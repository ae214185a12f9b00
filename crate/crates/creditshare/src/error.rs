use creditshare_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Format { .. } => 1,
            CliError::Params(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidParams(_) => 2,
                CoreError::NonConvergence { .. } => 3,
                CoreError::Domain { .. }
                | CoreError::Precondition(_)
                | CoreError::RegimeMismatch { .. }
                | CoreError::Unsolvable(_)
                | CoreError::UndefinedShare => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
