use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime in [2, 2^20]")]
    InvalidPrime(u64),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("negative exponent {0}")]
    NegativeExponent(i64),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("unsupported computation: {0}")]
    Unsupported(String),
    #[error("u-form is not well defined: {0}")]
    NotWellDefined(String),
    #[error("u-form defines only a near splitting: {0}")]
    NearSplittingOnly(String),
    #[error("ideal is not compatible: {0}")]
    NotCompatible(String),
    #[error("extension is not generically finite: {0}")]
    NotGenericallyFinite(String),
    #[error("trace does not clear denominators although both rings are declared normal: {0}")]
    DenominatorNotClearing(String),
    #[error("splittings are not compatible along the map: {0}")]
    IncompatiblePair(String),
    #[error("square does not commute: {0}")]
    NonCommutingSquare(String),
    #[error("map is not finite: {0}")]
    NotFinite(String),
    #[error("degree bound too small: {0}")]
    BoundTooSmall(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
