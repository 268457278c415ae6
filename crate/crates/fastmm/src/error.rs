//! Crate-wide error type.

use crate::matrix::MatrixError;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Matrix(MatrixError),
    /// An algorithm coefficient does not embed into the entry ring
    /// (e.g. 1/2 over integers).
    CoeffNotRepresentable(String),
    ShapeMismatch(String),
    /// Operation requires a verified algorithm and got an unverified one.
    NotVerified(String),
    /// Recursive application hit a size not divisible by the base.
    SizeNotSplittable {
        size: usize,
        base: usize,
    },
    /// Exponent formulas are undefined for base mkn = 1.
    UndefinedLogBase,
    /// A generated decomposition failed its own verification; carries the
    /// violated index triple.
    DerivationFailure(String),
    /// Text-format parse failure with a 1-based line number.
    Parse {
        line: usize,
        msg: String,
    },
    /// Input value outside the documented range.
    RangeViolation(String),
    /// Interpolation was configured with too few or repeated nodes.
    BadInterpolationNodes(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Matrix(e) => write!(f, "{e}"),
            Error::CoeffNotRepresentable(msg) => {
                write!(f, "coefficient not representable: {msg}")
            }
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::NotVerified(msg) => write!(f, "unverified algorithm refused: {msg}"),
            Error::SizeNotSplittable { size, base } => write!(
                f,
                "size {size} not divisible by block base {base}; pad the input first"
            ),
            Error::UndefinedLogBase => write!(f, "exponent undefined for mkn = 1"),
            Error::DerivationFailure(msg) => write!(f, "derivation failure: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Error::RangeViolation(msg) => write!(f, "range violation: {msg}"),
            Error::BadInterpolationNodes(msg) => write!(f, "bad interpolation nodes: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<MatrixError> for Error {
    fn from(e: MatrixError) -> Self {
        Error::Matrix(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
