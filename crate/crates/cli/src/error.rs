use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("cannot parse record: {0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] feedback_core::Error),
}

impl CliError {
    /// 2 usage, 3 I/O, 4 numeric or consistency, 5 compute budget.
    pub fn exit_code(&self) -> u8 {
        use feedback_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::Domain(_)) => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) | CliError::Parse(_) => 3,
            CliError::Core(E::Budget { .. }) => 5,
            CliError::Core(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "usage",
            3 => "io",
            5 => "budget",
            _ => "numeric",
        }
    }
}
