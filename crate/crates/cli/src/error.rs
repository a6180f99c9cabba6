use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error(transparent)]
    Core(#[from] schursim::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use schursim::Error as E;
        let code = match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Resource(_) => 4,
            CliError::Core(E::OracleGuard { .. }) => 4,
            CliError::Core(
                E::InvalidQubitCount(_)
                | E::InvalidIrrep { .. }
                | E::InvalidDimensionLabel { .. }
                | E::LocalityTooLarge { .. }
                | E::InvalidParameter(_)
                | E::InvalidState(_)
                | E::TooFewQubits { .. }
                | E::QubitMismatch(..),
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        };
        ExitCode::from(code)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
