use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates a documented bound.
    #[error("invalid configuration `{field}`: {message}")]
    Config { field: String, message: String },

    /// Argument outside the supported domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Period-average quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The preparation pulse excites (almost) no atoms, so the protocol
    /// probability is undefined.
    #[error("degenerate preparation: excited fraction {probability:e} below 1e-12")]
    DegeneratePreparation { probability: f64 },

    #[error("scan of {evaluations} points exceeds the cap of {cap} evaluations")]
    GridTooLarge { evaluations: u64, cap: u64 },

    /// Integrator norm drifted beyond the allowed bound.
    #[error("two-level integration lost norm by {drift:e}; reduce the step size")]
    StepSize { drift: f64 },

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable category, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } => "config",
            Error::Domain(_) => "domain",
            Error::Quadrature { .. } => "quadrature",
            Error::Numeric(_) => "numeric",
            Error::DegeneratePreparation { .. } => "degenerate_preparation",
            Error::GridTooLarge { .. } => "grid_too_large",
            Error::StepSize { .. } => "step_size",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
