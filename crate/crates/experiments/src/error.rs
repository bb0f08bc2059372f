use std::path::PathBuf;

/// Failure classes surfaced by the library and mapped to CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum ExpError {
    #[error("config not found: {}", .0.display())]
    ConfigNotFound(PathBuf),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("cannot write {}: {source}", path.display())]
    OutputUnwritable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] rlcompile_core::Error),
    #[error("{0}")]
    Runtime(String),
}

pub type ExpResult<T> = std::result::Result<T, ExpError>;

impl ExpError {
    /// Stable machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self {
            ExpError::ConfigNotFound(_) => "config_not_found",
            ExpError::ConfigInvalid(_) => "config_invalid",
            ExpError::OutputUnwritable { .. } => "output_unwritable",
            ExpError::Core(_) | ExpError::Runtime(_) => "runtime",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::ConfigNotFound(_) => 3,
            ExpError::ConfigInvalid(_) => 4,
            ExpError::OutputUnwritable { .. } => 5,
            ExpError::Core(_) | ExpError::Runtime(_) => 6,
        }
    }

    pub(crate) fn output(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExpError::OutputUnwritable {
            path: path.into(),
            source,
        }
    }
}
