//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by numerical routines, samplers, and configuration
/// validation.
///
/// Numerical routines never return a silently wrong answer: quadrature that
/// cannot reach its tolerance reports [`Error::NonConvergence`] carrying the
/// best estimate and its error bound so callers can decide whether the
/// partial result is usable.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function
    /// (e.g. `x ≤ 0` for a Bessel K evaluation, a pole of the gamma
    /// function).
    #[error("domain error in {what}: {why}")]
    Domain { what: &'static str, why: String },

    /// A configuration value violates a documented invariant.
    #[error("invalid parameter {what}: {why}")]
    InvalidParameter { what: &'static str, why: String },

    /// Adaptive quadrature exhausted its subdivision budget before meeting
    /// the requested tolerance. `value` is the best estimate, `error` the
    /// estimated absolute error at the point of giving up.
    #[error("quadrature did not converge: estimate {value:e} ± {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    /// A simulation window is too small for the truncation-bias guarantee.
    #[error("invalid window: {why}")]
    InvalidWindow { why: String },

    /// An operation that needs a non-degenerate input received a degenerate
    /// one (e.g. a zero-norm interferer channel where a projection is
    /// required, or an asymptotic expansion at a confluent exponent).
    #[error("degenerate input for {what}: {why}")]
    Degenerate { what: &'static str, why: String },

    /// An outage curve flattened instead of decaying, so no diversity slope
    /// can be fitted (interference-limited floor).
    #[error("insufficient decay: {why}")]
    InsufficientDecay { why: String },
}

impl Error {
    pub(crate) fn domain(what: &'static str, why: impl Into<String>) -> Self {
        Error::Domain {
            what,
            why: why.into(),
        }
    }

    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::InvalidParameter {
            what,
            why: why.into(),
        }
    }

    pub(crate) fn degenerate(what: &'static str, why: impl Into<String>) -> Self {
        Error::Degenerate {
            what,
            why: why.into(),
        }
    }
}
