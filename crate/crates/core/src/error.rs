use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or parameter outside the domain of the chart or family.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not in SL(2,R): det = {det}")]
    NotUnimodular { det: f64 },

    /// The first fundamental form is (numerically) singular.
    #[error("degenerate surface jet: EG - F^2 = {discriminant:e}")]
    Degenerate { discriminant: f64 },

    /// Generating curve with vanishing speed.
    #[error("irregular generating curve at s = {s}: speed {speed:e}")]
    Regularity { s: f64, speed: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("integrator failure: {0}")]
    Integrator(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
