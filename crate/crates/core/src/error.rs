use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fields or operators live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The potential failed one of the double-well checks.
    #[error("potential validation failed: {0}")]
    Validation(String),

    #[error("eigensolver failed: {message} (residuals: {residuals:?})")]
    Solver { message: String, residuals: Vec<f64> },

    /// The physical model assumptions do not hold (e.g. doublet not separated).
    #[error("model error: {0}")]
    Model(String),

    #[error("integration failed at t = {time:e}: {message}")]
    Integration { time: f64, message: String },

    #[error("separatrix (k^2 = {k2}): no closed-form imbalance, use the ODE path")]
    Separatrix { k2: f64 },

    #[error("inconsistent two-mode parameters: {0}")]
    Consistency(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Same error with `ctx` prefixed to its message.
    pub fn context(self, ctx: &str) -> Error {
        match self {
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::GridMismatch(m) => Error::GridMismatch(format!("{ctx}: {m}")),
            Error::Validation(m) => Error::Validation(format!("{ctx}: {m}")),
            Error::Solver { message, residuals } => {
                Error::Solver { message: format!("{ctx}: {message}"), residuals }
            }
            Error::Model(m) => Error::Model(format!("{ctx}: {m}")),
            Error::Integration { time, message } => {
                Error::Integration { time, message: format!("{ctx}: {message}") }
            }
            Error::Consistency(m) => Error::Consistency(format!("{ctx}: {m}")),
            Error::Usage(m) => Error::Usage(format!("{ctx}: {m}")),
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) | Error::Usage(_) | Error::Domain(_) => 2,
            Error::GridMismatch(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::Solver { .. } | Error::Model(_) => 3,
            Error::Integration { .. } | Error::Consistency(_) => 4,
            Error::Separatrix { .. } => 5,
        }
    }
}
