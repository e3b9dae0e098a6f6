use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Core(#[from] optograv_core::Error),
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("eigen decomposition failed: {0}")]
    Eigen(String),
    #[error("steady state residual {0:e} above tolerance (degenerate or ill-conditioned null space)")]
    Residual(f64),
    #[error("no convergence: {0}")]
    NoConvergence(&'static str),
    #[error("unphysical density matrix: {0}")]
    Unphysical(&'static str),
}

pub type OracleResult<T> = std::result::Result<T, OracleError>;
