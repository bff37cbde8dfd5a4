use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed arguments: wrong lengths, out-of-range probabilities, ...
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A parameter schedule or theorem precondition does not hold
    /// (for example, the duration is too short for the requested separation).
    #[error("schedule error: {0}")]
    Schedule(String),

    /// The empirical characteristic function would be divided by a value
    /// below the configured floor.
    #[error("division floor violated at |t+v| = {radius:.6}: |phi| = {value:.3e} < floor {floor:.3e}")]
    DivisionFloor { radius: f64, value: f64, floor: f64 },

    /// An oracle was queried outside its admissible domain.
    #[error("query outside domain: {0}")]
    Domain(String),

    /// Injected noise exceeded its declared bound.
    #[error("noise contract violated: |g| = {observed:.6e} exceeds bound {bound:.6e}")]
    NoiseContract { observed: f64, bound: f64 },

    /// The reference estimator's pencil is numerically rank deficient.
    #[error("ill-conditioned pencil (condition number {condition:.3e})")]
    Conditioning { condition: f64 },

    /// Boosting could not find enough dense clusters.
    #[error("boosting failed: found {found} of {needed} dense clusters")]
    BoostFailure { found: usize, needed: usize },

    /// Requested object would be too large to materialize densely.
    #[error("infeasible size: {0}")]
    Feasibility(String),

    /// The distribution family does not support the requested operation.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
