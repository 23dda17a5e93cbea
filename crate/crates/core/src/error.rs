use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown hazard `{0}`")]
    UnknownHazard(String),
    #[error("unknown project {0}")]
    UnknownProject(u32),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid {path}: {message}")]
    Validation { path: String, message: String },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("unsupported bundle format version {found} (supported: {supported})")]
    Version { found: u32, supported: u32 },
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("{free} free projects exceed the enumeration limit of {limit}")]
    Capacity { free: usize, limit: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("regression fit failed: {0}")]
    Fit(String),
    #[error("missing column `{0}` in event file")]
    Schema(String),
    #[error("row {row}, column `{column}`: {message}")]
    Record { row: usize, column: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { path: path.into(), message: message.into() }
    }

    /// Field path for errors that name one, used for structured error bodies.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Validation { path, .. } => Some(path),
            Error::Record { column, .. } => Some(column),
            Error::Schema(column) => Some(column),
            _ => None,
        }
    }
}
