use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("series failed to converge: {0}")]
    Convergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("moment of order {k} does not exist (requires k < aq = {aq})")]
    MomentNonexistent { k: u32, aq: f64 },
    #[error("root bracketing failed: {0}")]
    Bracketing(String),
    #[error("no interior maximum: {0}")]
    NoInteriorMaximum(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("design is rank deficient: {0}")]
    RankDeficient(String),
    #[error("sampler failure: {0}")]
    Sampler(String),
}

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Numerical,
    Sampler,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Dimension(_) | Error::MomentNonexistent { .. } => {
                ErrorKind::Usage
            }
            Error::RankDeficient(_) | Error::Sampler(_) => ErrorKind::Sampler,
            _ => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
