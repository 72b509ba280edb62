use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid alphabet size Q = {0}: need Q >= 3")]
    InvalidAlphabet(u64),
    #[error("invalid word length M = {0}: need M >= 1")]
    InvalidLength(u64),
    #[error("invalid step range l = {l} for Q = {q}: need 1 <= l and 2l < Q")]
    InvalidStepRange { q: u64, l: u64 },
    #[error("Q^M = {q}^{m} does not fit a 128-bit integer")]
    Overflow { q: u64, m: u64 },
    #[error("mode component k[{axis}] = {value} outside [0, {q})")]
    OutOfRangeMode { axis: usize, value: u64, q: u64 },
    #[error("invalid code point: {0}")]
    InvalidCodePoint(String),
    #[error("{what}: requires {required}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u128,
    },
    #[error("{what} memory budget exceeded: {required} > {budget}")]
    MemoryBudget {
        what: &'static str,
        required: u128,
        budget: u128,
    },
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("survival series too short for a tail fit: {0}")]
    WindowTooShort(String),
    #[error("no closed form for M = {0}")]
    UnsupportedM(u64),
    #[error("lattice Green integral diverges for M = {0} (need M >= 3)")]
    DivergentIntegral(u64),
    #[error("singular linear system: {0}")]
    SolverSingular(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::MemoryBudget { .. } | Error::Overflow { .. }
        )
    }

    /// True for errors caused by parameters the caller supplied.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidAlphabet(_)
                | Error::InvalidLength(_)
                | Error::InvalidStepRange { .. }
                | Error::OutOfRangeMode { .. }
                | Error::InvalidCodePoint(_)
                | Error::UnsupportedM(_)
                | Error::DivergentIntegral(_)
                | Error::InvalidArgument(_)
        )
    }
}
