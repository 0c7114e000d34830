use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition.
    Validation(String),
    /// An iterative kernel gave up before reaching its tolerance.
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// The data support fewer exponential modes than were requested.
    RankDeficient { rank: usize, requested: usize },
    /// A normalisation step hit a zero (or non-finite) scale.
    Degenerate(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation(msg) => write!(f, "invalid input: {msg}"),
            Error::NonConvergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what} did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::RankDeficient { rank, requested } => write!(
                f,
                "signal has numerical rank {rank} but {requested} modes were requested; \
                 retry with at most {rank} modes"
            ),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
