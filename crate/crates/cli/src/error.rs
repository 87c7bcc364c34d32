use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] cavity_dimer::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("validation failed: {failed} of {total} checks")]
    Validation { failed: usize, total: usize },
    #[error("{failed} of {total} grid points failed; see the status columns")]
    PointFailures { failed: usize, total: usize },
}

impl CliError {
    /// 1 validation failure, 2 configuration or I/O error, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Numerical(_) | CliError::PointFailures { .. } => 3,
        }
    }
}

impl From<&CliError> for ExitCode {
    fn from(e: &CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
