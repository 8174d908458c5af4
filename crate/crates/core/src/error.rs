use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::classfile::ClassFileError;
use crate::extract::ExtractError;
use crate::fixture::FixtureError;
use crate::linearize::CyclicHierarchy;
use crate::program::ModelError;
use crate::slt::LexError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("input not found: {}", .0.display())]
    InputNotFound(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: mixes fixtures and class files", .0.display())]
    MixedInputKinds(PathBuf),
    #[error("{}: {message}", path.display())]
    ModeMismatch { path: PathBuf, message: String },
    #[error("{}: no class files, fixtures or source files found", .0.display())]
    EmptySubmission(PathBuf),
    #[error("{}: {source}", path.display())]
    ClassFile {
        path: PathBuf,
        #[source]
        source: ClassFileError,
    },
    #[error("{}: {source}", path.display())]
    Fixture {
        path: PathBuf,
        #[source]
        source: FixtureError,
    },
    #[error("{}: {source}", path.display())]
    Lex {
        path: PathBuf,
        #[source]
        source: LexError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Cyclic(#[from] CyclicHierarchy),
    #[error("{}: found {found} submission(s), need at least 2", dir.display())]
    FewerThanTwoSubmissions { dir: PathBuf, found: usize },
}

impl Error {
    /// Configuration problems are usage errors; everything else is about
    /// the inputs.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
