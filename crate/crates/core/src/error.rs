use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A grid ratio that must be a whole number is not.
    #[error("nonconforming grid: {ratio} = {value} is not integral")]
    NonIntegral { ratio: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol slot {slot} outside window (valid slots {first}..={last})")]
    SlotOutsideWindow { slot: i64, first: i64, last: i64 },

    #[error("waveforms live on different grids")]
    GridMismatch,

    #[error("{lags} lags requested from a sequence of length {len}")]
    TooManyLags { lags: usize, len: usize },

    #[error("segment length {segment} exceeds signal length {len}")]
    SegmentTooLong { segment: usize, len: usize },

    #[error("insufficient data for a stable estimate: {0}")]
    InsufficientData(String),

    #[error("noise level N0 = 0 leaves the quantity undefined")]
    ZeroNoise,

    #[error("operation requires a finite constellation")]
    ContinuousConstellation,

    #[error("constellation: {0}")]
    Constellation(String),

    #[error("i/o: {0}")]
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
