use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// The variants fall in three groups that the command-line front end maps to
/// distinct exit codes: input errors (`Parse`, `StateOutOfRange`, ...),
/// resource errors (`CapExceeded`) and broken internal invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("state {state} is out of range 1..={n}")]
    StateOutOfRange { state: usize, n: usize },

    #[error("letter index {index} is out of range for an alphabet of {m} letters")]
    LetterOutOfRange { index: usize, m: usize },

    #[error("duplicate letter name `{0}`")]
    DuplicateLetter(String),

    #[error("invalid letter name `{0}`")]
    InvalidLetterName(String),

    #[error("state count mismatch: {left} vs {right}")]
    StateCountMismatch { left: usize, right: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} exceeds the configured cap ({requested} > {limit})")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }

    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }

    /// True for errors caused by malformed or inconsistent input.
    pub fn is_input(&self) -> bool {
        !self.is_resource() && !matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
