use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}: {message}")]
    Parse { file: String, message: String },
    #[error("{file}: {path}: {message}")]
    Field { file: String, path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse class {text:?}: {message}")]
    ClassParse { text: String, message: String },
    #[error(transparent)]
    Core(#[from] orbifold_core::Error),
}
