use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported scenario version {0} (expected 1)")]
    Version(u32),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("{kind} `{name}` refers to itself")]
    Cycle { kind: &'static str, name: String },
    #[error("{kind} `{name}`: {message}")]
    Definition { kind: &'static str, name: String, message: String },
    #[error("command needs `run.{0}`")]
    MissingSelection(&'static str),
    #[error(transparent)]
    Core(#[from] gerbe_core::Error),
}

pub type Result<T> = std::result::Result<T, LoadError>;
