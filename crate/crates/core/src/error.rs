use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} = {value} is outside the domain [{lower}, {upper}]")]
    Domain {
        what: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("configuration error at `{key}`: {reason}")]
    Configuration { key: String, reason: String },

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    /// Pivot fell below the relative threshold during banded elimination.
    #[error("singular system: pivot {pivot:e} at row {row} (scale {scale:e})")]
    SingularSystem { row: usize, pivot: f64, scale: f64 },

    #[error("root search failed after {iterations} iterations: last iterate {last_x}, residual {residual:e}")]
    RootFailure {
        iterations: usize,
        last_x: f64,
        residual: f64,
    },

    #[error("solver failed at time step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Configuration {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}
