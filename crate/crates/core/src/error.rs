use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {0}")]
    UnsupportedDim(usize),
    #[error("invalid index set {0:?} for dimension {1}")]
    BadIndex(Vec<usize>, usize),
    #[error("expected a homogeneous form of grade {expected}, got {found}")]
    WrongGrade { expected: usize, found: String },
    #[error("matrix is not antisymmetric (residual {0:e})")]
    NotAntisymmetric(f64),
    #[error("curvature operator is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("grade {0} out of range for dimension {1}")]
    GradeOutOfRange(usize, usize),
    #[error("invariant violated: {what} (residual {residual:e})")]
    Invariant { what: String, residual: f64 },
    #[error("subspace is not closed under the bracket (residual {0:e})")]
    NotClosed(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn invariant(what: impl Into<String>, residual: f64) -> Self {
        Error::Invariant {
            what: what.into(),
            residual,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::BadIndex(..)
            | Error::WrongGrade { .. }
            | Error::NotAntisymmetric(_)
            | Error::NotSymmetric(_)
            | Error::Io(_) => 2,
            Error::UnsupportedDim(_) => 3,
            Error::UnknownCatalog(_) => 4,
            Error::Constraint(_) => 5,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
