use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A circuit or scenario is wired inconsistently.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A numerical precondition (Hermiticity, positivity, normalization) failed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A conserved quantity drifted during a simulation.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn configuration<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Configuration(msg.into()))
}
