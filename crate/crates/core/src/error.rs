use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("({b}, {c}) is not a quadratic Hensel state for p = {p}: {reason}")]
    InvalidState {
        b: String,
        c: String,
        p: u64,
        reason: &'static str,
    },

    #[error("polynomial {0} is reducible over Q")]
    ReduciblePolynomial(String),

    #[error("polynomial {poly} has no root in Q_{p}")]
    NoRootInQp { poly: String, p: u64 },

    #[error("approximation {approx} does not separate the roots of {poly} at p^{exponent}")]
    AmbiguousSelector {
        poly: String,
        approx: String,
        exponent: i64,
    },

    #[error("the map is undefined at zero")]
    ZeroInput,

    #[error("step cap {cap} exceeded (last element: {last})")]
    CapExceeded { cap: usize, last: String },

    #[error("algorithm {0} cannot be used here")]
    InvalidAlgorithm(String),

    #[error("malformed expansion: {0}")]
    MalformedExpansion(String),

    #[error("verification failed at n = {index}: expected {expected}, got {actual}")]
    VerificationFailed {
        index: usize,
        expected: String,
        actual: String,
    },
}
