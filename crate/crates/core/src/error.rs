use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("exponent at byte {offset} depends on x; write exp(y*log(x)) instead")]
    NonConstantExponent { offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-smooth point at x = {x}")]
    NonSmoothPoint { x: f64 },

    #[error("tolerance not reached: best value {value} with error estimate {estimate}")]
    ToleranceNotReached { value: f64, estimate: f64 },

    #[error("invalid interval: need lo < hi, got [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("argument {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
