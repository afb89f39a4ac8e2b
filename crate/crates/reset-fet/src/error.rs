//! Error types shared across the crate.

/// Crate-wide error type.
///
/// Numerical routines never silently regularize or clamp: a singular
/// system, an unstable extrapolation or a violated precondition is
/// reported through the matching variant.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain, or a parameter
    /// record violates one of its invariants.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure (extrapolation, series, quadrature) failed
    /// to converge to its requested accuracy.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The finite-difference system is singular or near-singular.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// The Richardson check between grid sizes n and 2n exceeded its
    /// tolerance, or the grid violates the Peclet guard.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// A Laplace inversion is too order-sensitive to be trusted.
    #[error("unstable inversion: {0}")]
    UnstableInversion(String),

    /// A conditional law was requested on an event of negligible
    /// probability.
    #[error("degenerate conditioning: {0}")]
    DegenerateConditioning(String),

    /// A simulated path hit the safety horizon before exiting.
    #[error("horizon exceeded: path still alive at t = {t_cap} after {resets} resets")]
    HorizonExceeded { t_cap: f64, resets: u64 },

    /// An example verification found a discrepancy.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    /// Extrapolation across a removable singularity disagreed between
    /// the two sides.
    #[error("singularity unresolved: {0}")]
    SingularityUnresolved(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
