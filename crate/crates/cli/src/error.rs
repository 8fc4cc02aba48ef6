//! CLI error taxonomy mapped to exit codes: config errors exit 2, data
//! errors exit 3, anything else 1.

use olmr_core::boosters::BoostError;
use olmr_core::dataio::DataError;
use olmr_core::potentials::PotentialError;
use olmr_core::types::DomainError;
use olmr_core::weak_learners::WlcError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(#[from] DataError),
    #[error("{0}")]
    Boost(#[from] BoostError),
    #[error("{0}")]
    Potential(#[from] PotentialError),
    #[error("{0}")]
    Domain(#[from] DomainError),
    #[error("{0}")]
    Wlc(#[from] WlcError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            _ => "runtime",
        }
    }
}
