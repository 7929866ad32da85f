use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or argument is outside the supported domain.
    #[error("{0}")]
    Domain(String),

    /// A series, walk or iterative search hit its cap before meeting its stop rule.
    #[error("{what} did not converge after {steps} steps")]
    NonConvergence { what: String, steps: usize },

    /// The result is not representable even in log space.
    #[error("{0} overflowed")]
    Overflow(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("no observations in input")]
    EmptyData,

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn non_convergence(what: impl Into<String>, steps: usize) -> Self {
        Error::NonConvergence {
            what: what.into(),
            steps,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Overflow(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
