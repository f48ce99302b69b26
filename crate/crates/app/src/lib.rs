//! File I/O, configuration, evaluation harness and CLI for `stft-dereverb`.

pub mod cli;
pub mod config;
pub mod error;
pub mod files;
pub mod harness;
pub mod pipeline;
pub mod speech;
pub mod wav;

pub use config::ExperimentConfig;
pub use error::{AppError, AppResult};
pub use harness::{cmd_evaluate, evaluate, render_csv, EvalRow, Evaluation};
