use std::path::PathBuf;

use botminer_core::characterize::CharacterizeError;
use botminer_core::detector::DetectError;
use botminer_core::forest::ForestError;
use botminer_core::ingest::ParseError;
use botminer_core::template::TemplateError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{what}, line {line}: {message}")]
    Format {
        what: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Characterize(#[from] CharacterizeError),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(what: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format { what: what.into(), line, message: message.into() }
    }

    /// Process exit code: 2 for usage mistakes, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
