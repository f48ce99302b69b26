//! Least-squares design of the inter-frame filter bank from a known channel.
//!
//! The STFT is not time invariant, so the channel is probed with an impulse at
//! every sample position `lambda = 0..R-1` inside a hop. For each bin `k` the
//! filtered channel frames of all probes are stacked into one overdetermined
//! complex system whose target is the STFT of the direct path alone:
//!
//! ```text
//! sum_{r=-A}^{B} G_k[r] H^(lambda)[l - r, k]  ~=  Ht^(lambda)[l, k]
//! ```
//!
//! Probe `lambda` contributes the frames `l_min ..= equation_last(lambda)`,
//! where `l_min = 1 - Q - A` and `equation_last(lambda) = 2 + B +
//! floor((M + lambda - 1) / R)`. These cover every frame the filtered response
//! can reach, and over all probes they add up to `(2 + A + B + Q) R + M - 1`
//! rows per bin.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter_bank::FilterBank;
use crate::lsq::{solve_least_squares, Matrix};
use crate::scalar::Real;
use crate::signal::ImpulseResponse;
use crate::stft::{analyze_frames, apply_filter_bank, synthesize_span, Spectrogram, StftConfig};

/// Dimensions of the per-bin stacked system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsProblem {
    pub overlap: usize,
    pub hop: usize,
    pub future: usize,
    pub past: usize,
    pub channel_len: usize,
}

impl LsProblem {
    pub fn new(overlap: usize, hop: usize, future: usize, past: usize, channel_len: usize) -> Self {
        Self {
            overlap,
            hop,
            future,
            past,
            channel_len,
        }
    }

    /// Earliest frame affected by a probe, `1 - Q - A`.
    pub fn l_min(&self) -> isize {
        1 - self.overlap as isize - self.future as isize
    }

    /// Latest frame affected by probe `lambda`, `1 + B + floor((M + lambda - 2) / R)`.
    pub fn l_max(&self, lambda: usize) -> isize {
        let num = self.channel_len as isize + lambda as isize - 2;
        1 + self.past as isize + num.div_euclid(self.hop as isize)
    }

    /// Frame span materialized for every probe spectrogram: `l_min ..= l_max(R - 1)`.
    pub fn frame_span(&self) -> (isize, isize) {
        (self.l_min(), self.l_max(self.hop - 1))
    }

    /// Last equation frame of probe `lambda`.
    pub fn equation_last(&self, lambda: usize) -> isize {
        let num = self.channel_len as isize + lambda as isize - 1;
        2 + self.past as isize + num.div_euclid(self.hop as isize)
    }

    /// `(lambda, l)` pairs in row order.
    pub fn equation_rows(&self) -> impl Iterator<Item = (usize, isize)> + '_ {
        (0..self.hop).flat_map(move |lambda| {
            (self.l_min()..=self.equation_last(lambda)).map(move |l| (lambda, l))
        })
    }

    /// Stacked equations per bin.
    pub fn rows(&self) -> usize {
        (0..self.hop)
            .map(|lambda| (self.equation_last(lambda) - self.l_min() + 1) as usize)
            .sum()
    }

    /// Coefficients per bin, `A + B + 1`.
    pub fn unknowns(&self) -> usize {
        self.future + self.past + 1
    }

    /// Closed form `(2 + A + B + Q) R + M - 1`.
    pub fn closed_form_rows(&self) -> usize {
        (2 + self.future + self.past + self.overlap) * self.hop + self.channel_len - 1
    }
}

/// STFTs of one response probed at every offset `lambda = 0..R-1`.
#[derive(Debug, Clone)]
pub struct ShiftedResponses<T: Real> {
    source: ImpulseResponse<T>,
    problem: LsProblem,
    spectra: Vec<Spectrogram<T>>,
}

impl<T: Real> ShiftedResponses<T> {
    /// Response before shifting.
    pub fn source(&self) -> &ImpulseResponse<T> {
        &self.source
    }

    pub fn problem(&self) -> &LsProblem {
        &self.problem
    }

    pub fn spectra(&self) -> &[Spectrogram<T>] {
        &self.spectra
    }

    pub fn len(&self) -> usize {
        self.spectra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectra.is_empty()
    }

    pub fn config(&self) -> &StftConfig<T> {
        self.spectra[0].config()
    }

    /// Time-domain taps of probe `lambda`: the source delayed by `lambda`.
    pub fn shifted_taps(&self, lambda: usize) -> Vec<T> {
        let mut taps = vec![T::zero(); lambda];
        taps.extend_from_slice(self.source.taps());
        taps
    }
}

fn probe_spectra<T: Real>(
    source: &ImpulseResponse<T>,
    config: &StftConfig<T>,
    problem: LsProblem,
) -> Vec<Spectrogram<T>> {
    let (first, last) = problem.frame_span();
    (0..config.hop())
        .map(|lambda| {
            let mut samples = vec![T::zero(); lambda];
            samples.extend_from_slice(source.taps());
            analyze_frames(&samples, config, first, last, source.sample_rate())
        })
        .collect()
}

/// STFTs of the channel's response to `delta[n - lambda]` for every
/// `lambda = 0..R-1`, over frames `l_min ..= l_max(R-1)`.
pub fn shifted_channel_stfts<T: Real>(
    h: &ImpulseResponse<T>,
    config: &StftConfig<T>,
    future: usize,
    past: usize,
) -> ShiftedResponses<T> {
    let problem = LsProblem::new(config.overlap(), config.hop(), future, past, h.len());
    ShiftedResponses {
        source: h.clone(),
        problem,
        spectra: probe_spectra(h, config, problem),
    }
}

/// STFTs of the reflection-free response `h[n_d] delta[n - n_d - lambda]`,
/// on the same frame span as [`shifted_channel_stfts`].
pub fn target_stfts<T: Real>(
    h: &ImpulseResponse<T>,
    config: &StftConfig<T>,
    future: usize,
    past: usize,
) -> ShiftedResponses<T> {
    let nd = h.direct_index();
    let mut taps = vec![T::zero(); nd + 1];
    taps[nd] = h.direct_amplitude();
    let direct = ImpulseResponse::with_direct_index(taps, h.sample_rate(), nd)
        .expect("direct-path response is valid");
    let problem = LsProblem::new(config.overlap(), config.hop(), future, past, h.len());
    ShiftedResponses {
        spectra: probe_spectra(&direct, config, problem),
        source: direct,
        problem,
    }
}

fn check_pair<T: Real>(
    channel: &ShiftedResponses<T>,
    target: &ShiftedResponses<T>,
) -> Result<()> {
    if channel.len() != channel.problem.hop || target.len() != channel.len() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} probe spectrograms, got {} channel and {} target",
            channel.problem.hop,
            channel.len(),
            target.len()
        )));
    }
    if channel.config() != target.config() {
        return Err(Error::DimensionMismatch(
            "channel and target use different STFT configurations".into(),
        ));
    }
    for (c, t) in channel.spectra.iter().zip(&target.spectra) {
        if (c.first_frame(), c.last_frame()) != (t.first_frame(), t.last_frame()) {
            return Err(Error::DimensionMismatch(
                "channel and target frame spans differ".into(),
            ));
        }
    }
    Ok(())
}

/// Stacked design matrix and right-hand side of bin `k` for a filter with
/// `future` and `past` frames.
pub fn bin_system<T: Real>(
    channel: &ShiftedResponses<T>,
    target: &ShiftedResponses<T>,
    problem: &LsProblem,
    k: usize,
) -> (Matrix<Complex<T>>, Vec<Complex<T>>) {
    let rows: Vec<(usize, isize)> = problem.equation_rows().collect();
    let a = problem.future as isize;
    let columns = (0..problem.unknowns())
        .map(|j| {
            let r = j as isize - a;
            rows.iter()
                .map(|&(lambda, l)| channel.spectra[lambda].get(l - r, k))
                .collect()
        })
        .collect();
    let rhs = rows
        .iter()
        .map(|&(lambda, l)| target.spectra[lambda].get(l, k))
        .collect();
    (Matrix::from_columns(rows.len(), columns), rhs)
}

/// Result of [`solve_filter_bank`].
#[derive(Debug, Clone)]
pub struct SolvedBank<T: Real> {
    pub bank: FilterBank<T>,
    /// Squared residual of each solved bin `0..=N/2`.
    pub residuals: Vec<T>,
    /// Numerical rank of each solved bin's design matrix.
    pub ranks: Vec<usize>,
    /// Bins whose channel is identically zero; their coefficients are zero.
    pub unexcited_bins: Vec<usize>,
}

/// Solves every bin `0..=N/2` in the least-squares sense and mirrors the
/// rest by conjugate symmetry.
pub fn solve_filter_bank<T: Real>(
    channel: &ShiftedResponses<T>,
    target: &ShiftedResponses<T>,
    future: usize,
    past: usize,
) -> Result<SolvedBank<T>> {
    check_pair(channel, target)?;
    let config = channel.config();
    let problem = LsProblem {
        future,
        past,
        ..channel.problem
    };
    let n = config.n_bins();
    let solved: Vec<_> = (0..=n / 2)
        .into_par_iter()
        .map(|k| {
            let (a, b) = bin_system(channel, target, &problem, k);
            solve_least_squares(a, &b)
        })
        .collect();

    let mut unexcited = Vec::new();
    let mut residuals = Vec::with_capacity(solved.len());
    let mut ranks = Vec::with_capacity(solved.len());
    let mut half = Vec::with_capacity(solved.len());
    for (k, sol) in solved.into_iter().enumerate() {
        if sol.rank == 0 {
            unexcited.push(k);
        }
        residuals.push(sol.residual);
        ranks.push(sol.rank);
        half.push(sol.x);
    }
    let bank = FilterBank::from_half_spectrum(config, future, past, half)?;
    Ok(SolvedBank {
        bank,
        residuals,
        ranks,
        unexcited_bins: unexcited,
    })
}

/// Squared residual of bin `k` of `bank` on the stacked system.
pub fn bin_residual<T: Real>(
    channel: &ShiftedResponses<T>,
    target: &ShiftedResponses<T>,
    bank: &FilterBank<T>,
    k: usize,
) -> T {
    let problem = LsProblem {
        future: bank.future(),
        past: bank.past(),
        ..channel.problem
    };
    let (a, b) = bin_system(channel, target, &problem, k);
    a.mul_vec(bank.bin(k))
        .iter()
        .zip(&b)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum()
}

/// End-to-end response of channel plus filter.
#[derive(Debug, Clone)]
pub struct EffectiveChannel<T: Real> {
    /// Response to `delta[n - lambda]`, shifted back by `lambda`.
    pub per_shift: Vec<ImpulseResponse<T>>,
    /// Inverse STFT of the phase-aligned average over probes.
    pub average: ImpulseResponse<T>,
    /// Tap index corresponding to time zero in every response.
    pub lead: usize,
}

/// Phase factor aligning probe `lambda` with the frame start in bin `k`:
/// `exp(+j 2 pi k lambda / N)`.
pub fn probe_alignment<T: Real>(k: usize, lambda: usize, n: usize) -> Complex<T> {
    let phase = T::lit(2.0) * T::PI() * T::from_usize_lossy((k * lambda) % n)
        / T::from_usize_lossy(n);
    Complex::from_polar(T::one(), phase)
}

/// Filtered probe spectrograms `G * H^(lambda)`.
pub fn filtered_probes<T: Real>(
    channel: &ShiftedResponses<T>,
    bank: &FilterBank<T>,
) -> Result<Vec<Spectrogram<T>>> {
    channel
        .spectra
        .iter()
        .map(|s| apply_filter_bank(s, bank))
        .collect()
}

/// Per-probe and averaged effective channels.
pub fn effective_channel<T: Real>(
    channel: &ShiftedResponses<T>,
    bank: &FilterBank<T>,
) -> Result<EffectiveChannel<T>> {
    let filtered = filtered_probes(channel, bank)?;
    let hop = channel.problem.hop;
    let n = channel.config().n_bins();

    let mut spans = Vec::with_capacity(hop);
    for (lambda, spec) in filtered.iter().enumerate() {
        let (start, samples) = synthesize_span(spec)?;
        spans.push((start - lambda as isize, samples));
    }

    let mut avg = filtered[0].clone();
    {
        let scale = T::one() / T::from_usize_lossy(hop);
        let out = avg.data_mut();
        out.iter_mut()
            .for_each(|z| *z = Complex::new(T::zero(), T::zero()));
        for (lambda, spec) in filtered.iter().enumerate() {
            for (idx, (o, &v)) in out.iter_mut().zip(spec.data()).enumerate() {
                let k = idx % n;
                *o = *o + v * probe_alignment::<T>(k, lambda, n) * scale;
            }
        }
    }
    let avg_span = synthesize_span(&avg)?;

    let earliest = spans
        .iter()
        .map(|(s, _)| *s)
        .chain(std::iter::once(avg_span.0))
        .min()
        .unwrap_or(0)
        .min(0);
    let lead = (-earliest) as usize;
    let end = spans
        .iter()
        .map(|(s, v)| s + v.len() as isize)
        .chain(std::iter::once(avg_span.0 + avg_span.1.len() as isize))
        .max()
        .unwrap_or(0);
    let total = (end + lead as isize).max(1) as usize;
    let nd = channel.source.direct_index() + lead;
    let fs = channel.source.sample_rate();

    let place = |start: isize, samples: &[T]| -> Result<ImpulseResponse<T>> {
        let mut taps = vec![T::zero(); total];
        let base = (start + lead as isize) as usize;
        for (t, &v) in taps[base..].iter_mut().zip(samples) {
            *t = v;
        }
        ImpulseResponse::with_direct_index(taps, fs, nd)
    };

    let per_shift = spans
        .iter()
        .map(|(s, v)| place(*s, v))
        .collect::<Result<Vec<_>>>()?;
    let average = place(avg_span.0, &avg_span.1)?;
    Ok(EffectiveChannel {
        per_shift,
        average,
        lead,
    })
}

/// STFT-domain and time-domain error powers of a filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBoundReport<T> {
    /// `(1/N) sum_k sum_lambda sum_l |Ht - Hhat|^2`.
    pub stft_error_power: T,
    /// `sum_lambda sum_n (ht^(lambda)[n] - hhat^(lambda)[n])^2`.
    pub time_error_power: T,
    /// Time-domain error power of each probe.
    pub per_shift_time_error: Vec<T>,
    pub bound_satisfied: bool,
    /// `stft_error_power - time_error_power`.
    pub slack: T,
}

/// Relative tolerance on the bound comparison. Differences below machine
/// epsilon times the target energy are also accepted.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Evaluates both error powers and checks that the STFT-domain one bounds
/// the time-domain one.
pub fn check_error_bound<T: Real>(
    channel: &ShiftedResponses<T>,
    target: &ShiftedResponses<T>,
    bank: &FilterBank<T>,
) -> Result<ErrorBoundReport<T>> {
    check_pair(channel, target)?;
    let n = T::from_usize_lossy(channel.config().n_bins());
    let filtered = filtered_probes(channel, bank)?;
    let mut stft_power = T::zero();
    let mut per_shift = Vec::with_capacity(filtered.len());
    for (lambda, est) in filtered.iter().enumerate() {
        let diff = target.spectra[lambda].difference(est)?;
        stft_power = stft_power + diff.power() / n;

        let (start, samples) = synthesize_span(est)?;
        let desired = target.shifted_taps(lambda);
        let mut err = T::zero();
        for (i, &v) in samples.iter().enumerate() {
            let t = start + i as isize;
            let d = if t >= 0 && (t as usize) < desired.len() {
                desired[t as usize]
            } else {
                T::zero()
            };
            err = err + (d - v) * (d - v);
        }
        // desired taps outside the synthesized support
        for (t, &d) in desired.iter().enumerate() {
            let t = t as isize;
            if t < start || t >= start + samples.len() as isize {
                err = err + d * d;
            }
        }
        per_shift.push(err);
    }
    let time_power: T = per_shift.iter().copied().sum();
    let tol = T::lit(BOUND_TOLERANCE);
    // squared errors at rounding level carry no information about the bound
    let reference: T = (0..target.len())
        .map(|l| crate::scalar::energy(&target.shifted_taps(l)))
        .sum();
    let floor = T::epsilon() * reference;
    Ok(ErrorBoundReport {
        stft_error_power: stft_power,
        time_error_power: time_power,
        per_shift_time_error: per_shift,
        bound_satisfied: time_power <= stft_power + tol * stft_power + floor,
        slack: stft_power - time_power,
    })
}

/// Solves the filter bank for `h` with `A = future`, `B = past`.
pub fn design_filter_bank<T: Real>(
    h: &ImpulseResponse<T>,
    config: &StftConfig<T>,
    future: usize,
    past: usize,
) -> Result<SolvedBank<T>> {
    let channel = shifted_channel_stfts(h, config, future, past);
    let target = target_stfts(h, config, future, past);
    solve_filter_bank(&channel, &target, future, past)
}
