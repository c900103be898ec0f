use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("generator index {index} out of range for {n} generators")]
    GeneratorRange { index: usize, n: usize },
    #[error("variable index {index} out of range for {p} variables")]
    VariableRange { index: usize, p: usize },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors raised while reading user text (syntax and index range).
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::GeneratorRange { .. } | Error::VariableRange { .. }
        )
    }
}
