use thiserror::Error;

use crate::model::DomainKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("target degree {target} is below the polynomial degree {degree}")]
    DegreeTooLow { degree: u32, target: u32 },

    #[error("degree-{part_degree} part cannot be lifted to degree {target} on the sphere (odd gap)")]
    OddDegreeGap { part_degree: u32, target: u32 },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("expected a {expected} instance, found {found}")]
    WrongDomain { expected: DomainKind, found: DomainKind },

    #[error("level {level} is below the minimum level {minimum}")]
    LevelTooSmall { level: u32, minimum: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
