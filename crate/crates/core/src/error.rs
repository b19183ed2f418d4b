use std::fmt;

use thiserror::Error;

/// Witness that a power series diverges at a point: the term of index `index`
/// has valuation `valuation`, which is not positive, so the terms cannot tend to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivergenceWitness {
    pub index: u64,
    pub valuation: i64,
}

impl fmt::Display for DivergenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "term {} has valuation {}", self.index, self.valuation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot invert a value that is zero to precision O({p}^{abs_prec})")]
    NotInvertible { p: u64, abs_prec: i64 },
    #[error("value has negative valuation {0}; not a p-adic integer")]
    NotAnInteger(i64),
    #[error("insufficient precision: need {needed} digits, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("relative precision {requested} exceeds the precision cap {cap}")]
    PrecisionCapExceeded { requested: i64, cap: u32 },
    #[error("coefficient field mismatch")]
    FieldMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("Hensel condition not met: {0}")]
    ConditionNotMet(String),
    #[error("indeterminate condition: derivative at the center is zero to precision")]
    IndeterminateCondition,
    #[error("series diverges: {0}")]
    Divergent(DivergenceWitness),
    #[error("Lipschitz bound undefined for a constant polynomial")]
    UndefinedBound,
    #[error("enumeration guard exceeded: {size} > {limit}")]
    GuardExceeded { size: u128, limit: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
