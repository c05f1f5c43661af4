use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every message names the violated precondition so the CLI can print it
/// verbatim as a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: Gamma is undefined at the non-positive integer {0}")]
    Pole(f64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("empty interval: {0}")]
    EmptyInterval(String),

    #[error("divergent integral: {0}")]
    Divergence(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("smoothness error: {0}")]
    Smoothness(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("monotonicity violated: {0}")]
    Monotonicity(String),
}

impl Error {
    /// True for failures caused by numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_)
                | Error::Verification(_)
                | Error::Monotonicity(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
