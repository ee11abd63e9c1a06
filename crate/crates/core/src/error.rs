use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters; reported before any work is done.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "calibration error: {got} samples is too few for target Pf {target_pf}; need at least {required}"
    )]
    Calibration {
        target_pf: f64,
        required: usize,
        got: usize,
    },

    #[error("detector mismatch: metric is {metric}, threshold is {threshold}")]
    DetectorMismatch {
        metric: &'static str,
        threshold: &'static str,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {}: line {line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 2 for configuration problems,
    /// 3 for anything touching the filesystem.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } => 3,
            _ => 2,
        }
    }
}
