use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("bad scene: {0}")]
    BadScene(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        source: amphough_core::Error,
    },

    #[error(transparent)]
    Core(#[from] amphough_core::Error),

    #[error("thread pool: {0}")]
    Threads(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
