use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("digit {digit} at position {position} is outside [0, {}]", prime - 1)]
    DigitOutOfRange {
        digit: u32,
        position: usize,
        prime: u32,
    },

    #[error("digit sequence is empty")]
    EmptyDigits,

    #[error("precision must be at least 1")]
    InvalidPrecision,

    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("denominator {den} is divisible by p = {prime}")]
    DenominatorDivisibleByP { den: i64, prime: u32 },

    #[error("precision mismatch: {left} vs {right}")]
    PrecisionMismatch { left: usize, right: usize },

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u32, right: u32 },

    #[error("value is zero at precision {0}")]
    ZeroAtPrecision(usize),

    #[error("value is not a unit")]
    NotUnit,

    #[error("map is not contractive: multiplier has valuation 0")]
    NotContractive,

    #[error("contraction system has no maps")]
    EmptySystem,

    #[error("symbol {symbol} is outside the alphabet [1, {alphabet}]")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },

    #[error("word has no symbols")]
    EmptyWord,

    #[error("word provides {available} symbols, {needed} required")]
    WordTooShort { needed: usize, available: usize },

    #[error("alphabet mismatch: expected {expected}, found {found}")]
    AlphabetMismatch { expected: u32, found: u32 },

    #[error("value {value} is outside [1, {alphabet}]")]
    ValueOutOfRange { value: u32, alphabet: u32 },

    #[error("parity entry {0} is not 1 or 2")]
    EntryOutOfRange(u32),

    #[error("index family violates the coverage condition: images cover {covered} of {alphabet} symbols")]
    CoverageViolation { covered: usize, alphabet: u32 },

    #[error("malformed index family: {0}")]
    InvalidFamilyShape(String),

    #[error("enumeration of {count} words exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("at least two distinct points are required")]
    TooFewPoints,

    #[error("words of lengths {left} and {right} cannot be compared")]
    IncomparableLength { left: usize, right: usize },

    #[error("case {0} is not one of 1..=4")]
    InvalidCase(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("iteration did not stabilise within {0} steps")]
    NoConvergence(usize),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed ({invariant}): {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
