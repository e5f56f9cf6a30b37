use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid comb: {0}")]
    InvalidComb(String),

    #[error("unbounded tail: partial sums of c_n did not stabilize within {horizon} terms")]
    UnboundedTail { horizon: usize },

    #[error("{0} requires exact S(1); this comb only has a float value")]
    NotExact(&'static str),

    #[error("division by a series with zero constant term")]
    ZeroConstantTerm,

    #[error("series known only below x^{have}, x^{need} requested")]
    InsufficientOrder { have: i64, need: i64 },

    #[error("non-cancelling Laurent part: coefficient of x^{power} is nonzero")]
    NonCancellingLaurent { power: i64 },

    #[error("internal consistency check failed: {what} differs at x^{index}")]
    Consistency { what: &'static str, index: i64 },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("enumeration budget exceeded: n = {n} > {max}")]
    Budget { n: usize, max: usize },

    #[error("letter budget of {cap} letters exceeded")]
    LetterBudget { cap: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
