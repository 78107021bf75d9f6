use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("not a module: relation {relation} fails in degree {degree}")]
    NotAModule { relation: String, degree: i64 },

    #[error("framing mismatch: {0}")]
    FramingMismatch(String),

    #[error("point off variety: {nonzero} nonzero residuals")]
    OffVariety { nonzero: usize },

    #[error("window exhausted: degree {needed} exceeds truncation bound {bound}")]
    WindowExhausted { needed: i64, bound: i64 },

    #[error("characteristic too small: p = {p} must exceed {dim}, rerun with larger p")]
    CharacteristicTooSmall { p: u64, dim: usize },

    #[error("matrix factorization: {0}")]
    MatrixFactorization(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("computation failed: {0}")]
    Computation(String),
}

impl Error {
    /// Machine-readable error kind used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Parse { .. } => "parse",
            Error::InvalidAlgebra(_) => "invalid_algebra",
            Error::NotAModule { .. } => "not_a_module",
            Error::FramingMismatch(_) => "framing_mismatch",
            Error::OffVariety { .. } => "off_variety",
            Error::WindowExhausted { .. } => "window_exhausted",
            Error::CharacteristicTooSmall { .. } => "characteristic_too_small",
            Error::MatrixFactorization(_) => "matrix_factorization",
            Error::Unsupported(_) => "unsupported",
            Error::Computation(_) => "computation",
        }
    }
}
