use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter lies outside the domain where the quantity is defined.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// Not enough encounter gaps were observed to estimate a mean free time.
    #[error("estimate unavailable: {0}")]
    EstimateUnavailable(String),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("sweep aborted: {failed} of {total} runs failed")]
    Sweep { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
