//! Single-channel dereverberation in the STFT domain.
//!
//! A known room impulse response is inverted by a bank of per-bin
//! inter-frame filters, designed by least squares over every sub-hop shift of
//! the channel. The crate also carries the evaluation metrics, a time-domain
//! least-squares inverse for comparison, and an image-method room simulator.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*F32` and
//! `*F64` aliases below name the common instantiations.

pub mod error;
pub mod filter_bank;
pub mod lsq;
pub mod metrics;
pub mod rir;
pub mod scalar;
pub mod signal;
pub mod solver;
pub mod stft;
pub mod widrow;

pub use error::{Error, Result};
pub use filter_bank::FilterBank;
pub use metrics::{drr, srr_seg, Decibels, DrrParams, MetricReport};
pub use rir::{batch_rooms, generate_rir, RoomRanges, RoomSpec};
pub use scalar::Real;
pub use signal::{ImpulseResponse, Signal};
pub use solver::{
    check_error_bound, design_filter_bank, effective_channel, solve_filter_bank,
    EffectiveChannel, ErrorBoundReport, LsProblem, SolvedBank,
};
pub use stft::{analyze, apply_filter_bank, make_window, synthesize, Spectrogram, StftConfig, WindowKind};
pub use widrow::{equalize, widrow_inverse, InverseFilter, InverseFilterSpec};

pub use num_complex::Complex;

pub type SignalF32 = Signal<f32>;
pub type SignalF64 = Signal<f64>;
pub type ImpulseResponseF32 = ImpulseResponse<f32>;
pub type ImpulseResponseF64 = ImpulseResponse<f64>;
pub type StftConfigF32 = StftConfig<f32>;
pub type StftConfigF64 = StftConfig<f64>;
pub type SpectrogramF32 = Spectrogram<f32>;
pub type SpectrogramF64 = Spectrogram<f64>;
pub type FilterBankF32 = FilterBank<f32>;
pub type FilterBankF64 = FilterBank<f64>;
