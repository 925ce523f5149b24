use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("operator {0} is not Hermitian")]
    NonHermitian(String),

    #[error("invalid gate targets: {0}")]
    BadTarget(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("point has {got} coordinates, circuit has {expected} parameters")]
    PointLength { expected: usize, got: usize },

    #[error("point is not a Clifford point (coordinate {0})")]
    NotClifford(usize),

    #[error("statevector cap exceeded: n = {n} > {cap}")]
    StatevectorCap { n: usize, cap: usize },

    #[error("Pauli propagation term cap exceeded: {terms} > {cap}")]
    TermCap { terms: usize, cap: usize },

    #[error("exact enumeration over 4^{m} points exceeds the budget of {budget} points")]
    ExactBudget { m: usize, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// True for the errors that signal an engine ran out of budget.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::StatevectorCap { .. } | Error::TermCap { .. } | Error::ExactBudget { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
