use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A raw input parameter violates its domain (non-positive value etc.).
    #[error("invalid parameter `{name}`: {reason} (got {value:e})")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// The circuit values put the effective cutoff frequencies off the real
    /// axis (L0^2/R^2 <= 2 C L0); no Ohmic reduction exists for them.
    #[error("unusable circuit parameters: L0^2/R^2 = {lhs:e} must exceed 2*C*L0 = {rhs:e}")]
    UnusableCutoff { lhs: f64, rhs: f64 },

    /// A quadrature did not reach the requested relative tolerance within the
    /// panel budget. The achieved estimate is reported, never silently used.
    #[error(
        "quadrature failed to converge: achieved relative error {achieved:e}, requested {requested:e}"
    )]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// The closed-form coherence machinery left its validity region
    /// (e.g. a' <= 0).
    #[error("parameter-regime failure: {0}")]
    Regime(String),

    /// A configuration file could not be parsed; `line` is 1-based, 0 for
    /// file-level problems.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
