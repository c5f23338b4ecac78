use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: n must be at least 1 (got {0})")]
    InvalidDimension(i64),

    #[error("non-positive product at k={k}: superdiag*subdiag = {product}")]
    NonPositiveProduct { k: usize, product: f64 },

    #[error("non-finite matrix entry at k={k}")]
    NonFiniteEntry { k: usize },

    #[error("unsupported parity: {0}")]
    UnsupportedParity(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("pole in hypergeometric sum at term j={j}: {which} vanishes")]
    Pole { j: usize, which: &'static str },

    #[error("length mismatch: exact has {exact} values, computed has {computed}")]
    LengthMismatch { exact: usize, computed: usize },

    #[error("inconsistent sweep: {0}")]
    InconsistentSweep(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
