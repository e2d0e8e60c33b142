//! Command-line front end for `compat-core`.
//!
//! Every command produces one JSON report on stdout and a process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | compatible / passed / reconstructed |
//! | 1 | incompatible / failed |
//! | 2 | undetermined (probe only) |
//! | 3 | input error, including refused preconditions |
//! | 4 | internal cross-check mismatch or numerical failure |

pub mod args;
pub mod commands;
pub mod formats;
pub mod report;

use compat_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INCOMPATIBLE: u8 = 1;
pub const EXIT_UNDETERMINED: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("io error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("cross-check mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Format(_) => EXIT_INPUT,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Core(e) => match e {
                Error::Incompatible(_) => EXIT_INCOMPATIBLE,
                Error::Numeric(_) => EXIT_MISMATCH,
                _ => EXIT_INPUT,
            },
        }
    }
}
