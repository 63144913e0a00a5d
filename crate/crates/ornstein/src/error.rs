use std::path::PathBuf;

use crate::opsfile::OpsFileError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    OpsFile(#[from] OpsFileError),
    #[error(transparent)]
    Core(#[from] ornstein_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} exists; pass --overwrite to replace it")]
    Exists(PathBuf),
    #[error("bad witness file: {0}")]
    Witness(String),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 check failed, 2 usage error, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        use ornstein_core::Error as E;
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Core(
                E::DegenerateStart { .. } | E::LpInfeasible { .. } | E::LpUnbounded | E::LpIterationLimit(_),
            ) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
