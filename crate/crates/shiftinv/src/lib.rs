//! Configuration, file formats and command implementations for the `shiftinv` tool.
//!
//! The numerical work lives in [`shiftinv_core`]; this crate reads run configurations
//! and grid files, orchestrates the checks and writes reports.

pub mod commands;
pub mod config;
pub mod gridfile;
pub mod report;

pub use config::RunConfig;

use shiftinv_core::criteria::CriteriaError;

/// Process exit codes.
pub mod exit {
    /// Success, or the outcome matched the expected label.
    pub const OK: i32 = 0;
    /// A check failed, the outcome contradicted its label, or the run could not start.
    pub const FAILURE: i32 = 1;
    pub const HYPOTHESIS_VIOLATED: i32 = 2;
    /// SPLIT consensus or an inconclusive check.
    pub const INCONCLUSIVE: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Registry(#[from] shiftinv_core::registry::RegistryError),
    #[error(transparent)]
    Dilation(#[from] shiftinv_core::DilationError),
    #[error(transparent)]
    Genspace(#[from] shiftinv_core::genspace::GenspaceError),
    #[error(transparent)]
    Wavelet(#[from] shiftinv_core::wavelets::WaveletError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    GridFile(#[from] gridfile::GridFileError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Criteria(CriteriaError::HypothesisViolated { .. }) => exit::HYPOTHESIS_VIOLATED,
            _ => exit::FAILURE,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
