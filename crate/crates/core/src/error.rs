use thiserror::Error;

/// Errors raised by the curvature toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("operation leaves the working window [{lo}, {hi}]: {what}")]
    WindowExit { lo: f64, hi: f64, what: String },

    #[error("sphere of radius {radius} around {center} is empty")]
    EmptySphere { center: f64, radius: f64 },

    #[error("measures live on different spaces")]
    SpaceMismatch,

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("entropy is not finite for {0}")]
    EntropyDivergence(String),

    #[error("infeasible branching scenario: {0}")]
    InfeasibleScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Schema error pointing at the offending line and column of a JSON input.
pub(crate) fn json_schema_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(head, _)| head);
    Error::Schema(format!("line {}, column {}: {msg}", e.line(), e.column()))
}
