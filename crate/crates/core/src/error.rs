use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("affine map is singular")]
    SingularMap,
    #[error("degenerate coframe: {0}")]
    DegenerateFrame(String),
    #[error("vector field is not affine: {0}")]
    NotAffine(String),
    #[error("linear part is not nilpotent")]
    NotNilpotent,
    #[error("not lattice invariant: {0}")]
    NotInvariant(String),
    #[error("volume coefficient is not constant: {0}")]
    NotHomogeneous(String),
    #[error("form is not closed")]
    NotClosed,
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("isotopy unusable: {0}")]
    BadIsotopy(String),
    #[error("flux diagram violated: {0}")]
    DiagramViolation(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("torsion in first homology: {0}")]
    Torsion(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
