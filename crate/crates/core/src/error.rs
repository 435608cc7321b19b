use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityDomain(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid Prelec parameters (alpha={alpha}, beta={beta}): both must be finite and > 0")]
    InvalidPrelec { alpha: f64, beta: f64 },

    #[error("Renyi order {0} is within 1e-9 of 1; use Shannon explicitly")]
    RenyiNearOne(f64),

    #[error("Prelec weighting with alpha=1 and beta={0} has no interior fixed point")]
    UndefinedFixedPoint(f64),

    #[error("outcome count must be at least 2, got {0}")]
    OutcomeCount(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("utility table is empty")]
    EmptyTable,

    #[error("grid format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
