use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("dimension mismatch: expected {expected} points, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is in {found:?} representation, expected {expected:?}")]
    WrongRepresentation {
        expected: crate::grid::Representation,
        found: crate::grid::Representation,
    },

    #[error("time {t:.6e} a.u. lies outside the pulse [0, {t_total:.6e}]")]
    TimeOutOfRange { t: f64, t_total: f64 },

    #[error("time step {dt:.3e} exceeds the accuracy limit {dt_max:.3e}")]
    StepTooLarge { dt: f64, dt_max: f64 },

    #[error("problem size {size} exceeds the limit {limit} for {what}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("samples must be uniformly spaced")]
    NonUniformSpacing,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidConfig { .. }
                | Error::InvalidSweep(_)
                | Error::StepTooLarge { .. }
                | Error::SizeGuard { .. }
                | Error::Json(_)
        )
    }
}
