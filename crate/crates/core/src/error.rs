use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("{what}: entry {index} is not a valid probability ({value})")]
    InvalidProbability {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{what} does not sum to 1 (sum = {sum})")]
    NotNormalized { what: &'static str, sum: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("constraint set is infeasible (minimum violation {violation:.3e})")]
    Infeasible { violation: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("target power {target} unreachable; achievable range is ({min}, {max})")]
    UnreachablePower { target: f64, min: f64, max: f64 },

    #[error("input distribution and channel do not satisfy the MJT applicability condition (spread {spread:.3e})")]
    MjtNotApplicable { spread: f64 },

    #[error("{what} of 2^{log2_size:.2} exceeds the enumeration cap 2^{cap_log2}")]
    CapExceeded {
        what: &'static str,
        log2_size: f64,
        cap_log2: u32,
    },

    #[error("no accepted codewords across {trials} trials")]
    NoAcceptances { trials: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
