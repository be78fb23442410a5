use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error(transparent)]
    Core(#[from] extrapolab_core::Error),
    #[error("{path}: {err}")]
    Io { path: String, err: std::io::Error },
}

pub type LabResult<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        LabError::Io { path: path.as_ref().display().to_string(), err }
    }
}
