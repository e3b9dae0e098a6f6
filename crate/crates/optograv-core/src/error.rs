use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("Hilbert dimension {requested} exceeds the cap of {cap}")]
    DimensionOverflow { requested: usize, cap: usize },
    #[error("unsupported drive configuration: {0}")]
    UnsupportedDrive(&'static str),
    #[error("operation not defined for this regime: {0}")]
    RegimeMismatch(&'static str),
    #[error("no physical mean-field root")]
    NoPhysicalRoot,
    #[error("parameters within the critical margin (drive/critical = {ratio})")]
    Critical { ratio: f64 },
    #[error("singular linear system")]
    Singular,
    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),
    #[error("degenerate estimand: the signal vanishes")]
    DegenerateEstimand,
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
}
