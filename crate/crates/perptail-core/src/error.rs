//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the closed-form domain; the message names the bound.
    Domain(String),
    /// Model parameters violate a construction invariant.
    InvalidModel(String),
    /// `E[log |X|] >= 0`: the perpetuity series does not converge.
    NonNegativeDrift { drift: f64 },
    /// `h(s) - 1` has no sign change in the searchable domain.
    NoCramerRoot(String),
    /// The Cramér root sits at the boundary of the finiteness domain.
    BoundaryRoot(String),
    /// An iterative routine failed to converge.
    Convergence(String),
    /// Operation not defined for this model/configuration.
    Unsupported(String),
    /// Truncated remainder bound exceeds the tolerated share of the sum.
    Truncation { bound: f64, message: String },
    /// Sample budget too small for a meaningful standard error.
    TooFewSamples { given: u64, minimum: u64 },
    /// An almost-surely-finite loop hit its step guard.
    GuardExceeded { steps: u64, context: String },
    /// Monte Carlo estimate too noisy to use (SE/value above threshold).
    UnstableEstimate { value: f64, std_error: f64 },
    /// Requested x too deep for plain Monte Carlo at this budget.
    InfeasibleX { feasible_log_x_max: f64 },
    /// Root bracketing failed.
    BracketFailure(String),
    /// Estimated top Lyapunov exponent is positive beyond noise.
    PositiveLyapunov { gamma: f64, std_error: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::InvalidModel(m) => write!(f, "invalid model: {m}"),
            Error::NonNegativeDrift { drift } => write!(
                f,
                "nonnegative drift E[log|X|] = {drift}; the series requires E[log|X|] < 0"
            ),
            Error::NoCramerRoot(m) => write!(f, "no Cramér root: {m}"),
            Error::BoundaryRoot(m) => write!(f, "Cramér root at domain boundary: {m}"),
            Error::Convergence(m) => write!(f, "convergence failure: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Truncation { bound, message } => {
                write!(f, "truncation error (remainder bound {bound:.3e}): {message}")
            }
            Error::TooFewSamples { given, minimum } => {
                write!(f, "{given} samples given; at least {minimum} required")
            }
            Error::GuardExceeded { steps, context } => {
                write!(f, "step guard ({steps}) exceeded in {context}")
            }
            Error::UnstableEstimate { value, std_error } => write!(
                f,
                "unstable estimate: value {value:.3e}, std error {std_error:.3e}"
            ),
            Error::InfeasibleX { feasible_log_x_max } => write!(
                f,
                "x too deep for plain Monte Carlo at this budget; feasible up to log x ≈ {feasible_log_x_max:.2}"
            ),
            Error::BracketFailure(m) => write!(f, "bracket failure: {m}"),
            Error::PositiveLyapunov { gamma, std_error } => write!(
                f,
                "estimated Lyapunov exponent {gamma:.4} (± {std_error:.4}) is not negative"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
