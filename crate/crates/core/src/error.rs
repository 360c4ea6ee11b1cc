use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ordinal map: {0}")]
    InvalidOrdinalMap(String),
    #[error("invalid maximal chain: {0}")]
    InvalidChain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable count mismatch: {0} vs {1}")]
    VariableCount(usize, usize),
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("theta is a coefficient and cannot be {0}")]
    ThetaVariable(&'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("coefficient {coef} is not {p}-integral")]
    NotPIntegral { p: u64, coef: String },
    #[error("invalid simplicial set: {0}")]
    InvalidSimplicialSet(String),
    #[error("invalid simplicial map: {0}")]
    InvalidSimplicialMap(String),
    #[error("incompatible form: {0}")]
    IncompatibleForm(String),
    #[error("forms live on different spaces: {0} vs {1}")]
    SpaceMismatch(String, String),
    #[error("form is not homogeneous")]
    NotHomogeneous,
    #[error("simplex is not a vertex")]
    NotVertex,
    #[error("path is not a loop at the basepoint")]
    NotBasedLoop,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
