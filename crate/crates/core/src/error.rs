use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter space: {0}")]
    InvalidSpace(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point was required to lie in the parameter space and did not.
    #[error("point outside parameter space: {0}")]
    OutsideSpace(String),

    /// A rejection sampler hit its iteration cap.
    #[error("sampler gave up after {attempts} attempts: {what}")]
    RejectionCap { what: String, attempts: usize },

    /// Every particle carried zero weight after the step at time `t`.
    #[error("weight degeneracy at t={t}: all particle weights are zero")]
    Degenerate { t: usize },

    /// Degeneracy inside an iterated-filtering pass.
    #[error("weight degeneracy at pass {pass}, step {step}: all particle weights are zero")]
    DegeneratePass { pass: usize, step: usize },

    #[error("innovation covariance not positive definite at t={t}")]
    NotPositiveDefinite { t: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("data: {0}")]
    Data(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable label for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpace(_) => "invalid-space",
            Error::InvalidSchedule(_) => "invalid-schedule",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::OutsideSpace(_) => "outside-space",
            Error::RejectionCap { .. } => "rejection-cap",
            Error::Degenerate { .. } => "degenerate",
            Error::DegeneratePass { .. } => "degenerate",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::Config(_) => "config",
            Error::Data(_) => "data",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
