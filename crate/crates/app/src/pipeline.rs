//! Enhancement and per-channel measurements shared by the CLI and harness.

use stft_dereverb::metrics::{drr_single, srr_seg};
use stft_dereverb::scalar::convolve;
use stft_dereverb::solver::{effective_channel, shifted_channel_stfts, SolvedBank};
use stft_dereverb::{
    analyze, apply_filter_bank, design_filter_bank, drr, synthesize, widrow_inverse, Decibels,
    DrrParams, FilterBankF64, ImpulseResponseF64, InverseFilterSpec, SignalF64, StftConfigF64,
};

use crate::config::ExperimentConfig;
use crate::error::{AppError, AppResult};

/// Filters `y` with `bank`, keeping `y.len()` samples from time zero.
pub fn apply_bank(y: &SignalF64, bank: &FilterBankF64) -> AppResult<SignalF64> {
    let spec = analyze(y, bank.config())?;
    let filtered = apply_filter_bank(&spec, bank)?;
    Ok(synthesize(&filtered)?.resized(y.len()))
}

pub fn solve(h: &ImpulseResponseF64, config: &ExperimentConfig) -> AppResult<SolvedBank<f64>> {
    let stft = config.stft_config()?;
    Ok(design_filter_bank(
        h,
        &stft,
        config.filter.future,
        config.filter.past,
    )?)
}

/// Direct-path component `h[n_d] s[n - n_d]` of `s` through `h`.
pub fn direct_reference(s: &SignalF64, h: &ImpulseResponseF64) -> AppResult<SignalF64> {
    let nd = h.direct_index();
    let mut out = vec![0.0; nd];
    out.extend(s.samples().iter().map(|&v| v * h.direct_amplitude()));
    Ok(SignalF64::new(out, s.sample_rate())?)
}

pub fn check_rates(input: u32, rir: u32) -> AppResult<()> {
    if input != rir {
        return Err(AppError::SampleRateMismatch { input, rir });
    }
    Ok(())
}

/// DRR of the channel followed by the STFT filter bank.
pub fn enhanced_drr(
    h: &ImpulseResponseF64,
    bank: &FilterBankF64,
    stft: &StftConfigF64,
    params: &DrrParams,
) -> AppResult<Decibels<f64>> {
    let probes = shifted_channel_stfts(h, stft, bank.future(), bank.past());
    let eff = effective_channel(&probes, bank)?;
    Ok(drr(&eff.per_shift, params)?)
}

/// Time-domain inverse for `h` and the DRR of `h * g`.
pub fn widrow_drr(
    h: &ImpulseResponseF64,
    config: &ExperimentConfig,
) -> AppResult<(ImpulseResponseF64, Decibels<f64>)> {
    let mut spec = InverseFilterSpec::for_channel(h, config.baseline.filter_len, h.len());
    if let Some(d) = config.baseline.target_delay {
        spec.target_delay = d;
    }
    let inv = widrow_inverse(h, &spec)?;
    let composite = ImpulseResponseF64::with_direct_index(
        convolve(h.taps(), inv.filter.taps()),
        h.sample_rate(),
        spec.target_delay,
    )?;
    let db = drr_single(&composite, &config.metrics)?;
    Ok((inv.filter, db))
}

/// Segmental SRR of `s` through `h` before and after `bank`.
pub fn srr_pair(
    s: &SignalF64,
    h: &ImpulseResponseF64,
    bank: &FilterBankF64,
) -> AppResult<(f64, f64)> {
    let y = s.convolve(h);
    let reference = direct_reference(s, h)?;
    let enhanced = apply_bank(&y, bank)?;
    let before = srr_seg(&reference, &y, bank.config())?;
    let after = srr_seg(&reference, &enhanced, bank.config())?;
    Ok((before.srr_db, after.srr_db))
}
