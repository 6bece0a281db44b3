use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: invalid index: {source}", path.display())]
    Index { path: PathBuf, source: serde_json::Error },
    #[error("{}: unsupported index format version {found} (expected {expected})", path.display())]
    IndexVersion { path: PathBuf, found: u32, expected: u32 },
    #[error(transparent)]
    Core(#[from] densir::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} queries failed")]
    QueryFailures { failed: usize, total: usize },
    #[error("{failed} of {total} entries failed")]
    EntryFailures { failed: usize, total: usize },
    #[error("verification failed: {0} properties did not pass")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    /// 0 success, 1 input error, 2 verification failure, 3 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::VerificationFailed(_) => 2,
            Self::Core(densir::Error::DidNotConverge(_)) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
