use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value {0} is outside the allowed range {1}")]
    OutOfRange(String, &'static str),

    #[error("cannot parse {kind} literal {input:?}: {reason}")]
    Parse {
        kind: &'static str,
        input: String,
        reason: String,
    },

    #[error("word has {found} ones but {needed} are required")]
    TooFewOnes { needed: usize, found: usize },

    #[error("word of odd length {0} has no block image")]
    OddLength(usize),

    #[error("need {needed} digits but only {available} are available")]
    InsufficientDigits { needed: usize, available: usize },

    #[error("the empty word has no {0}")]
    EmptyWord(&'static str),

    #[error("eventually-zero word {0} lies outside the domain of rho")]
    EventuallyZero(String),

    #[error("more than {0} consecutive zeros scanned without a one")]
    ScanLimit(usize),

    #[error("materialization budget of {budget} digits exceeded (requested {requested})")]
    Budget { budget: usize, requested: usize },

    #[error("finite source exhausted after {0} digits")]
    Exhausted(usize),

    #[error("size guard: {what} = {value} exceeds the limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no preimage of length at most {0} found")]
    NoPreimage(usize),

    #[error("orbit undecided after {0} steps")]
    Undecided(usize),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
