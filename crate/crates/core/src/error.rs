use thiserror::Error;

/// Errors raised by the computational core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid root system {series}{rank}: {constraint}")]
    InvalidSystem {
        series: char,
        rank: usize,
        constraint: &'static str,
    },

    #[error("weight {weight} has {got} coordinates but the system has rank {expected}")]
    RankMismatch {
        weight: String,
        got: usize,
        expected: usize,
    },

    #[error("weight {weight} is not dominant on {scope}")]
    NotDominant { weight: String, scope: String },

    #[error("root index {index} out of range ({count} positive roots)")]
    RootIndex { index: usize, count: usize },

    #[error("invalid parabolic marking: {0}")]
    InvalidMarking(String),

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("invalid Legendre datum: {0}")]
    InvalidDatum(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("torsion number undefined: {0}")]
    Torsion(String),

    #[error("the zero weight (trivial representation) has no proper stabilizer parabolic")]
    TrivialWeight,

    #[error("parse error at position {position} near `{token}`: {message}")]
    Parse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("inconsistent cohomology constraints: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(position: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            token: token.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by resource limits rather than invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}
