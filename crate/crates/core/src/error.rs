use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("non-finite value at node {node}: {value}")]
    NonFinite { node: usize, value: f64 },

    #[error("node count {count} exceeds cap {cap}")]
    NodeCap { count: usize, cap: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("insufficient sampling: {0}")]
    InsufficientSampling(String),

    #[error("kernel dimension did not stabilize by degree {cap}: dimensions {dims:?}")]
    KernelNotFinite { cap: usize, dims: Vec<usize> },

    #[error("approximation target missed at j={j}: achieved {achieved:e}, target {target:e}")]
    ApproximationTarget { j: usize, achieved: f64, target: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::OutOfRange(msg.into()))
}
