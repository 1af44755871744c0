use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: cannot decode image: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{}: corrupt index file: {message}", path.display())]
    Corrupt { path: PathBuf, message: String },
    #[error("{}: index format version {found} is not supported (this build reads version {supported})", path.display())]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        supported: u32,
    },
    #[error("{}: index was written for a different feature layout (schema hash {found:016x}, expected {expected:016x})", path.display())]
    SchemaMismatch {
        path: PathBuf,
        found: u64,
        expected: u64,
    },
    #[error("{}: no decodable images found under any class directory", path.display())]
    EmptyCorpus { path: PathBuf },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] cbir_core::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
