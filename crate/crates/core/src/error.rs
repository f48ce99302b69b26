use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid STFT configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported window kind `{0}` (expected `sqrt-hann` or `rectangular-scaled`)")]
    UnsupportedWindow(String),

    #[error("window violates the reconstruction condition: max deviation {deviation:e} at hop offset {offset}")]
    WindowCondition { deviation: f64, offset: usize },

    #[error("empty signal")]
    EmptySignal,

    #[error("signal contains a non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("spectrogram is not conjugate symmetric (relative deviation {0:e})")]
    NotConjugateSymmetric(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid impulse response: {0}")]
    InvalidImpulseResponse(String),

    #[error("invalid inverse filter specification: {0}")]
    InvalidInverseFilter(String),

    #[error("invalid room: {0}")]
    InvalidRoom(String),

    #[error("infeasible parameter range `{name}`: {reason}")]
    InfeasibleRange { name: String, reason: String },

    #[error("all frames of the reference signal are silent")]
    AllSilent,

    #[error("filter bank format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
