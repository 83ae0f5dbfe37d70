use thiserror::Error;

/// Errors raised by the bound, kernel and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A kernel, rate or grid parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested quantity is not defined for the given input
    /// (e.g. an oversampling factor of exactly one).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation precondition does not hold, e.g. the reproduction
    /// condition `L >= (Leps + 1) / 2` when reconstructing from samples.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A certified error budget could not be met with the allowed effort.
    #[error("tolerance not met: requested {requested:e}, achieved {achieved:e} ({context})")]
    Tolerance {
        requested: f64,
        achieved: f64,
        context: String,
    },

    /// A series or integral diverges; carries the partial estimates that
    /// exhibit the growth.
    #[error("{what} does not converge (estimates {estimates:?})")]
    NonConvergent { what: String, estimates: Vec<f64> },

    /// The linear program has no finite optimum.
    #[error("linear program is unbounded")]
    Unbounded,

    /// Something that cannot happen for valid inputs did.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Tolerance { .. } | Error::NonConvergent { .. } | Error::Unbounded | Error::Internal(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
