use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angle {0}° outside the open interval (0°, 90°)")]
    AngleDomain(f64),

    #[error("LED count {0} is not a perfect square")]
    NotSquare(usize),

    #[error("LED and user positions coincide")]
    CoincidentPositions,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("pair index {pair} out of range for LED {led}")]
    PairOutOfRange { led: usize, pair: usize },

    #[error("invalid power split: a_strong={a_strong}, a_weak={a_weak}")]
    InvalidSplit { a_strong: f64, a_weak: f64 },

    #[error("singleton rate requested for a two-user pair")]
    NotSingleton,

    #[error("LED {led} has an odd user count {count} under the NOMA-imposed scheme")]
    OddCount { led: usize, count: usize },

    #[error(
        "parity repair did not converge after {iterations} iterations ({violations} odd LEDs left)"
    )]
    RepairFailed {
        iterations: usize,
        violations: usize,
    },

    #[error("bisection did not converge in {iterations} iterations, bracket [{lo}, {hi}]")]
    BisectionFailed { iterations: usize, lo: f64, hi: f64 },

    #[error("no LED has a pair to allocate")]
    NothingToAllocate,

    #[error("i/o: {0}")]
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

pub type Result<T> = std::result::Result<T, Error>;
