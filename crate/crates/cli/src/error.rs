use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::format::FormatError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },

    #[error(transparent)]
    Core(#[from] crofton_core::Error),

    #[error("audit failed: {failed} of {total} tests")]
    AuditFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crofton_core::Error as E;
        match self {
            CliError::Usage(_)
            | CliError::Read { .. }
            | CliError::Write { .. }
            | CliError::Format { .. } => EXIT_USAGE,
            CliError::Core(E::Expression { .. } | E::MeshParse { .. } | E::InvalidArgument(_)) => {
                EXIT_USAGE
            }
            CliError::Core(_) => EXIT_NUMERIC,
            CliError::AuditFailed { .. } => EXIT_AUDIT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
