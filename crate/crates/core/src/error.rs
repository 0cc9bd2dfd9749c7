use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("rejection sampler exhausted after {attempts} attempts")]
    Exhausted { attempts: usize },

    #[error("pair index {index} out of range for a pairing with {len} pairs")]
    PairIndex { index: usize, len: usize },

    #[error("a switching needs two distinct pairs, got index {0} twice")]
    SamePair(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tree ball of degree {d} and radius {r} needs {vertices} vertices, cap is {cap}")]
    SizeOverflow {
        d: usize,
        r: usize,
        vertices: u128,
        cap: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("linear solve did not reach tolerance: residual {residual:.3e} > {tolerance:.3e}")]
    Solver { residual: f64, tolerance: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("{check} bound violated: observed {observed:.6e} exceeds {bound:.6e}")]
    Violation {
        check: &'static str,
        observed: f64,
        bound: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("interval contains no eigenvalues")]
    EmptyInterval,

    #[error("matrix of order {n} exceeds the dense budget of {budget}")]
    Budget { n: usize, budget: usize },

    #[error("zero pivot at step {0} during LDLT factorization")]
    Breakdown(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
