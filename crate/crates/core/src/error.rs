use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("site parameter {alpha} at ({i}, {j}) is outside (0, 1)")]
    SiteParameter { i: i64, j: i64, alpha: f64 },
    #[error("malformed path: {0}")]
    Path(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("window too small: {0}")]
    Window(String),
    #[error("unknown experiment: {0}")]
    UnknownExperiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
