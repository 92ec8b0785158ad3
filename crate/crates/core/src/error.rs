use thiserror::Error;

/// Errors raised by the library. Messages are passed through verbatim by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    Budget {
        what: &'static str,
        needed: String,
        limit: String,
    },
    #[error("precision exhausted at p={p}: reached {reached} of {target} digits within node limit")]
    PrecisionExhausted { p: u64, reached: u32, target: u32 },
    #[error("precision budget exceeded: {0}")]
    PrecisionBudget(String),
    #[error("polynomial is not squarefree: resultant(f, f') = 0")]
    NotSquarefree,
    #[error("no p-adic zero at p={0}")]
    NoPadicZero(u64),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("input rejected by regularity gate: {0}")]
    NotRegular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &'static str, needed: impl ToString, limit: impl ToString) -> Error {
    Error::Budget {
        what,
        needed: needed.to_string(),
        limit: limit.to_string(),
    }
}
