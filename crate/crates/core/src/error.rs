use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is below the minimum of 5")]
    ModulusTooSmall(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("length {got} does not match modulus {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parse error at position {position} near `{token}`: {message}")]
    Parse {
        token: String,
        position: usize,
        message: String,
    },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("Gowers order {0} is outside the supported range {1}..={2}")]
    OrderOutOfRange(usize, usize, usize),
    #[error("average has real part {0:e}, expected a nonnegative value")]
    NegativeAverage(f64),
    #[error("no function supplied for corner {0:#b}")]
    MissingCorner(u32),
    #[error("function is not one-bounded: |f(x)| = {0} at x = {1}")]
    NotOneBounded(f64, usize),
    #[error("thresholds are inadmissible: eps2^-1 eps3 + eps4^-1 eps1 = {0} > 1/2")]
    InadmissibleThresholds(f64),
    #[error("input L2 norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("decomposition not certified after {iterations} iterations: {diagnostic}")]
    CertificationFailed {
        iterations: usize,
        diagnostic: String,
    },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("PET induction stopped: {reason}")]
    PetCapExceeded {
        reason: String,
        partial: Option<Box<crate::pet::PetTrace>>,
    },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("N = {0} is too large for exact search (limit {1})")]
    ExactTooLarge(u64, u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
