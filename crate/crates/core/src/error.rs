use thiserror::Error;

use crate::ecr::Params;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested moment is infinite (or undefined) for these arguments.
    #[error("moment does not exist for {violation}; admissible window is {window}")]
    MomentDoesNotExist { violation: String, window: String },

    /// A series ran out of terms before meeting its tolerance.
    #[error("{what} did not converge within {terms} terms (partial value {partial})")]
    SeriesNotConverged {
        what: &'static str,
        partial: f64,
        terms: usize,
    },

    /// An iterative estimator failed to converge.
    #[error("{what} did not converge after {iterations} iterations: {reason}")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        reason: String,
        best: Option<Params>,
    },

    /// The sample cannot support the requested fit (e.g. all values equal).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Malformed input text.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of numerical procedures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::MomentDoesNotExist { .. }
                | Error::SeriesNotConverged { .. }
                | Error::NotConverged { .. }
        )
    }
}
