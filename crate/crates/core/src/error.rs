use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Adaptive quadrature ran out of panels before meeting its tolerance.
    #[error("quadrature failed to converge after {panels} panels (residual estimate {residual:e})")]
    QuadratureFailure { residual: f64, panels: usize },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested object has no analytic form in the catalog.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A value left the representable binary64 range.
    #[error("range error: {0}")]
    Range(String),

    /// Input data contradicts the structural hypothesis of the operation.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    /// A series could not meet its tolerance within the term budget.
    #[error("term budget exhausted: {0}")]
    Budget(String),

    /// A tabulated sequence was read past its end.
    #[error("index {index} out of range for sequence of length {len}")]
    OutOfRange { index: usize, len: usize },

    /// A catalog identifier or serialized object could not be understood.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
