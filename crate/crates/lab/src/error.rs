use std::fmt;
use std::path::PathBuf;

use crate::config::ConfigErrors;

#[derive(Debug)]
pub enum LabError {
    /// The run configuration failed validation.
    Config(ConfigErrors),
    /// Bad command-line arguments.
    Usage(String),
    /// An input file exists but cannot be interpreted.
    Format { path: PathBuf, message: String },
    Io { path: PathBuf, source: std::io::Error },
    /// A numerical routine failed.
    Numerical(canetoads_core::Error),
    /// Acceptance criteria did not hold.
    Acceptance { failed: usize },
}

impl LabError {
    /// `1` when inputs are rejected before computing, `2` when computation
    /// or output fails.
    pub fn exit_code(&self) -> u8 {
        use canetoads_core::Error as E;
        match self {
            LabError::Config(_) | LabError::Usage(_) | LabError::Format { .. } => 1,
            LabError::Numerical(E::Domain(_) | E::InvalidGrid(_)) => 1,
            LabError::Io { .. } | LabError::Numerical(_) | LabError::Acceptance { .. } => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl fmt::Display) -> LabError {
        LabError::Format { path: path.into(), message: message.to_string() }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Config(e) => write!(f, "{e}"),
            LabError::Usage(m) => write!(f, "usage: {m}"),
            LabError::Format { path, message } => write!(f, "{}: {message}", path.display()),
            LabError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            LabError::Numerical(e) => write!(f, "numerical failure: {e}"),
            LabError::Acceptance { failed } => write!(f, "{failed} acceptance criterion(s) failed"),
        }
    }
}

impl std::error::Error for LabError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            LabError::Config(e) => Some(e),
            LabError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<canetoads_core::Error> for LabError {
    fn from(e: canetoads_core::Error) -> Self {
        LabError::Numerical(e)
    }
}

impl From<ConfigErrors> for LabError {
    fn from(e: ConfigErrors) -> Self {
        LabError::Config(e)
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
