use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frame error: {0}")]
    Frame(String),
    #[error("operands live on different frames")]
    FrameMismatch,
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tie-break error: {0}")]
    TieBreak(String),
    #[error("hole nesting exceeded depth {0}")]
    Recursion(usize),
    #[error("total mass of the measure is infinite")]
    InfiniteMeasure,
    #[error("variant error: {0}")]
    Variant(String),
    #[error("supports overlap: {0}")]
    SupportOverlap(String),
    #[error("invalid measure: {0}")]
    Measure(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
