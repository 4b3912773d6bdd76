use gapsandwich::vae::{CheckpointError, VaeError};
use gapsandwich::{DistError, HarnessError};
use thiserror::Error;

/// Failure of a command, carrying its documented exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    VerifyFailed(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Checkpoint(String),
    #[error("{0}")]
    Divergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Checkpoint(_) => 4,
            CliError::Divergence(_) => 5,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Numeric(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        CliError::Usage(match e.offending_key() {
            Some(key) => format!("bad distribution spec (key `{key}`): {e}"),
            None => format!("bad distribution spec: {e}"),
        })
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<VaeError> for CliError {
    fn from(e: VaeError) -> Self {
        match e {
            VaeError::DivergenceDetected { .. } => CliError::Divergence(e.to_string()),
            VaeError::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        CliError::Checkpoint(format!("checkpoint error: {e}"))
    }
}
