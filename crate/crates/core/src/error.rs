use crate::model::Sideband;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A steady-state denominator vanished (exact pole) for one drive tone.
    #[error("singular steady-state denominator for the {tone} tone (|d| = {modulus:e})")]
    Singular { tone: Sideband, modulus: f64 },

    #[error(
        "eigenvalue iteration did not converge after {iterations} iterations for matrix {matrix}"
    )]
    EigenNoConvergence { iterations: usize, matrix: String },

    /// The drift matrix is not strictly stable, so no stationary state exists.
    #[error("drift matrix is not strictly stable (max Re λ = {margin:e})")]
    Unstable { margin: f64 },

    #[error("ill-conditioned Lyapunov system: {0}")]
    Conditioning(String),

    #[error("covariance integration did not converge by t = {time} (residual {residual:e})")]
    NonConvergence { time: f64, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
