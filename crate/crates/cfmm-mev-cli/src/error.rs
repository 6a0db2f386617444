use cfmm_mev::Error as ModelError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn scenario(msg: impl Into<String>) -> Self {
        CliError::Scenario(msg.into())
    }

    /// Process exit code: 2 convergence failure, 3 degenerate statistic,
    /// 4 scenario validation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) => 4,
            CliError::Model(e) => match e.root_cause() {
                ModelError::ConvergenceFailure { .. } => 2,
                ModelError::DegenerateDenominator | ModelError::DegenerateConstants => 3,
                _ => 1,
            },
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
