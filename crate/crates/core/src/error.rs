use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    Domain(&'static str),
    /// A grid or configuration violates its construction invariants.
    InvalidGrid(&'static str),
    /// Two objects that must share a grid do not.
    GridMismatch,
    /// A tridiagonal or banded solve hit a zero pivot.
    SingularSystem,
    /// A non-finite value appeared during time stepping.
    NonFinite { time: f64 },
    /// The solution went negative beyond round-off.
    LostPositivity { time: f64, value: f64 },
    /// An iterative method did not reach its tolerance.
    NoConvergence { iterations: usize, last_change: f64 },
    /// A precondition of a construction is violated; the payload names it.
    Precondition(&'static str),
    /// Fitting input is degenerate (too few points, non-positive data).
    Fit(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::InvalidGrid(what) => write!(f, "invalid grid: {what}"),
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::SingularSystem => f.write_str("zero pivot in linear solve"),
            Error::NonFinite { time } => write!(f, "non-finite value at t = {time}"),
            Error::LostPositivity { time, value } => {
                write!(f, "negative value {value:e} at t = {time}")
            }
            Error::NoConvergence { iterations, last_change } => write!(
                f,
                "no convergence after {iterations} iterations (last change {last_change:e})"
            ),
            Error::Precondition(what) => write!(f, "precondition violated: {what}"),
            Error::Fit(what) => write!(f, "fit error: {what}"),
        }
    }
}

impl core::error::Error for Error {}
