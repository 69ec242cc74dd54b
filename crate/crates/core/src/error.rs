use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("codimension must be even (got {0})")]
    OddCodimension(usize),
    #[error("invalid complex structure: {0}")]
    InvalidComplexStructure(String),
    #[error("two-form is not skew-symmetric and imaginary: {0}")]
    NotSkew(String),
    #[error("degenerate curvature: the two-form is not symplectic")]
    DegenerateCurvature,
    #[error("curvature spectrum leaves the exact field: {0}")]
    InexactSpectrum(String),
    #[error("incompatible (B, J) pair: {0}")]
    Incompatible(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("connection does not preserve J along direction {direction}")]
    ConnectionBreaksJ { direction: usize },
    #[error("fiber mismatch: {0}")]
    FiberMismatch(String),
    #[error("operator degree {0} exceeds the supported bound 2")]
    DegreeTooHigh(usize),
    #[error("setup mismatch between operators")]
    SetupMismatch,
    #[error("model is not a flat torus: {0}")]
    NotTorus(String),
    #[error("non-integer Chern number {0} on plane ({1}, {2})")]
    NonIntegerChern(f64, usize, usize),
    #[error("eigensolver did not converge: max residual {0:e}")]
    NoConvergence(f64),
    #[error("ambiguous kernel cluster: {0}")]
    AmbiguousCluster(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
