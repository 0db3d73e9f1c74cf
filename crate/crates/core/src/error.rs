use thiserror::Error;

/// Errors raised by the numerical kernels and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Bessel order {0} is below -1/2")]
    InvalidOrder(f64),

    #[error("dimension must be an integer >= 2, got {0}")]
    InvalidDimension(usize),

    #[error("truncation K={k} exceeds the admissible K_max={k_max} at z={z}")]
    TruncationTooLarge { k: usize, k_max: usize, z: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("profile tail is not admissible: {0}")]
    InadmissibleTail(String),

    #[error("norm {which} diverges; see membership_scan for the family threshold")]
    DivergentNorm { which: String },

    #[error("oracle domain too small: {0}")]
    DomainTooSmall(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
