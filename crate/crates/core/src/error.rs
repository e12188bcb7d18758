use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameters or mismatched dimensions.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A clock was asked for a level it does not reach on the sampled horizon.
    /// Callers recover by extending the underlying path.
    #[error("clock exhausted: level {required} not reached (clock ends at {available})")]
    HorizonExhausted { required: f64, available: f64 },

    /// Adaptive horizon doubling ran out of budget.
    #[error(
        "extension budget of {budget} doublings exceeded: horizon {horizon}, \
         clock reached {reached} of required {required}"
    )]
    ExtensionBudget {
        budget: u32,
        horizon: f64,
        reached: f64,
        required: f64,
    },

    #[error("empty sample set")]
    EmptySample,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// An experiment's preconditions do not hold for the configured model.
    #[error("refused: {0}")]
    Refused(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
