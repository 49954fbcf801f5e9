use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classes used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input or a violated precondition.
    Input,
    /// A size or iteration budget ran out before the answer was known.
    Resource,
    /// A value fixed by an identity came out different.
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    UndefinedValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} divides the base {base}")]
    BaseDivisible { p: u64, base: String },
    #[error("{p} does not divide {expr}")]
    NotDivisible { p: u64, expr: String },
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("invalid range [{lo}, {hi})")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("invalid base pair ({a}, {b}): {reason}")]
    InvalidPair {
        a: i64,
        b: i64,
        reason: &'static str,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("not a solution: {0}")]
    NotASolution(String),
    #[error("budget exceeded: {what}; unfactored cofactor {cofactor}")]
    Budget { what: String, cofactor: String },
    #[error("bit budget exceeded: value needs about {needed} bits, budget is {budget}")]
    BitBudget { needed: u64, budget: u64 },
    #[error("valuation reached the cap {0}")]
    CapReached(u32),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Budget { .. } | Error::BitBudget { .. } | Error::CapReached(_) => {
                ErrorKind::Resource
            }
            Error::Invariant(_) => ErrorKind::Invariant,
            _ => ErrorKind::Input,
        }
    }
}
