use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] stft_dereverb::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: malformed WAV at byte offset {offset}: {reason}")]
    WavHeader {
        path: PathBuf,
        offset: u64,
        reason: String,
    },
    #[error("{path}: {reason}")]
    WavFormat { path: PathBuf, reason: String },
    #[error("sample rate mismatch: input is {input} Hz, impulse response is {rir} Hz")]
    SampleRateMismatch { input: u32, rir: u32 },
    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("csv: {0}")]
    Csv(String),
}

pub type AppResult<T> = std::result::Result<T, AppError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> AppError {
    let path = path.into();
    move |source| AppError::Io { path, source }
}
