use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} is not supported: n must be at least 5")]
    Dimension(i64),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("unsupported field layout: {0}")]
    UnsupportedLayout(String),

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid of {points} points exceeds the budget of {budget}")]
    Budget { points: usize, budget: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
