//! Command-line harness around `flatmod-core`: identity suites, sampling of
//! `Y_beta` and the extended chart, and evaluation of the generator forms.

pub mod cli;
pub mod config;
pub mod eval;
pub mod json;
pub mod report;
pub mod suites;

pub use config::{RunConfig, Suite, Tolerances};
pub use report::{IdentityRecord, ProbeRecord, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical breakdown: {0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<flatmod_core::Error> for CliError {
    fn from(e: flatmod_core::Error) -> Self {
        use flatmod_core::Error as E;
        match e {
            E::BranchCut { .. }
            | E::SingularChart
            | E::NonConvergence { .. }
            | E::QuadratureNonConvergence { .. }
            | E::IllConditioned { .. }
            | E::SimplexBoundary { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}
