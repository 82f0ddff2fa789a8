use thiserror::Error;

/// Domain errors shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("ConductorMismatch: {0}")]
    ConductorMismatch(String),
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("ArityMismatch: {0}")]
    ArityMismatch(String),
    #[error("NotDivisible")]
    NotDivisible,
    #[error("SingularMatrix")]
    SingularMatrix,
    #[error("ShapeError: {0}")]
    ShapeError(String),
    #[error("NotInvariant: {0}")]
    NotInvariant(String),
    #[error("NoMatrixModel: {0}")]
    NoMatrixModel(String),
    #[error("Unsupported: {0}")]
    Unsupported(String),
    #[error("GroupTooLarge: closure exceeded cap {0}")]
    GroupTooLarge(usize),
    #[error("NotFiniteOrder")]
    NotFiniteOrder,
    #[error("InternalInconsistency: {0}")]
    InternalInconsistency(String),
    #[error("FactorizationFailure: {0}")]
    FactorizationFailure(String),
    #[error("KernelNotInvariant")]
    KernelNotInvariant,
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("ParseError: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name, used on the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ConductorMismatch(_) => "ConductorMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::ArityMismatch(_) => "ArityMismatch",
            Error::NotDivisible => "NotDivisible",
            Error::SingularMatrix => "SingularMatrix",
            Error::ShapeError(_) => "ShapeError",
            Error::NotInvariant(_) => "NotInvariant",
            Error::NoMatrixModel(_) => "NoMatrixModel",
            Error::Unsupported(_) => "Unsupported",
            Error::GroupTooLarge(_) => "GroupTooLarge",
            Error::NotFiniteOrder => "NotFiniteOrder",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::FactorizationFailure(_) => "FactorizationFailure",
            Error::KernelNotInvariant => "KernelNotInvariant",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
