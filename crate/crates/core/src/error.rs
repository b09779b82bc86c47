use thiserror::Error;

/// Errors raised by the core library.
///
/// The variants map one-to-one onto the CLI exit codes: input problems,
/// cap/budget refusals, and internal invariant failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid staircase: {0}")]
    InvalidStaircase(String),

    #[error("mismatched resolution: {0} vs {1}")]
    MismatchedResolution(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: n = {n} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("budget exceeded: {needed} instances requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
