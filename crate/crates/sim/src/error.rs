use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// I/O failures and anything not covered below.
    pub const FAILURE: i32 = 1;
    /// Command-line usage error (reported by the argument parser).
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const LOAD: i32 = 4;
    /// The run finished but at least one flow was dropped.
    pub const DROPPED: i32 = 5;
    /// `validate` found a diameter that differs from its formula.
    pub const MISMATCH: i32 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("config {}: {reason}", path.display())]
    ConfigFile { path: PathBuf, reason: String },

    #[error(transparent)]
    Config(lisl_core::Error),

    #[error("cannot load records from {}: {reason}", path.display())]
    Load { path: PathBuf, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(lisl_core::Error),
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::ConfigFile { .. } | SimError::Config(_) => exit::CONFIG,
            SimError::Load { .. } => exit::LOAD,
            SimError::Io { .. } | SimError::Core(_) => exit::FAILURE,
        }
    }
}

impl From<lisl_core::Error> for SimError {
    fn from(e: lisl_core::Error) -> Self {
        match e {
            lisl_core::Error::Config { .. } => SimError::Config(e),
            other => SimError::Core(other),
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
