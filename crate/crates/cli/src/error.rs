use qcorr::QcorrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("invalid state: {0}")]
    InvalidState(QcorrError),

    #[error("{0} property violation(s)")]
    Violations(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::InvalidState(_) => 3,
            CliError::Violations(_) => 4,
        }
    }
}

impl From<QcorrError> for CliError {
    fn from(e: QcorrError) -> Self {
        match e {
            QcorrError::NotPositive(_) | QcorrError::NotHermitian(_) | QcorrError::BadTrace(_) => {
                CliError::InvalidState(e)
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
