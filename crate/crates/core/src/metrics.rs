//! Direct-to-reverberant ratio of impulse responses and segmental
//! signal-to-reverberation ratio of enhanced signals.

use crate::error::{Error, Result};
use crate::scalar::{sinc, Real};
use crate::signal::{ImpulseResponse, Signal};
use crate::stft::StftConfig;

/// Finite stand-in for an infinite ratio in reports and files.
pub const DB_CAP: f64 = 100.0;

/// Parameters of the direct-path energy search.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrrParams {
    /// Sinc sidelobes summed on each side of the direct path.
    pub eta: usize,
    /// Grid step of the fractional offset search over `[-1, 1]`.
    pub sigma_step: f64,
}

impl Default for DrrParams {
    fn default() -> Self {
        Self {
            eta: 8,
            sigma_step: 0.01,
        }
    }
}

impl DrrParams {
    pub fn validate(&self) -> Result<()> {
        if self.eta < 1 {
            return Err(Error::InvalidConfig("eta must be at least 1".into()));
        }
        if !(self.sigma_step > 0.0 && self.sigma_step <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sigma step {} outside (0, 1]",
                self.sigma_step
            )));
        }
        Ok(())
    }

    /// Offsets `-1, -1 + step, ..., 1`; both ends included and zero hit
    /// exactly whenever `1 / step` is an integer.
    pub fn sigma_grid(&self) -> Vec<f64> {
        let half = (1.0 / self.sigma_step).round() as i64;
        if ((half as f64) * self.sigma_step - 1.0).abs() < 1e-9 {
            (-half..=half).map(|i| i as f64 / half as f64).collect()
        } else {
            let mut grid = Vec::new();
            let mut s = -1.0;
            while s < 1.0 {
                grid.push(s);
                s += self.sigma_step;
            }
            grid.push(1.0);
            grid
        }
    }
}

/// Sinc-weighted energy around the direct path at fractional offset `sigma`.
pub fn direct_energy_at<T: Real>(h: &ImpulseResponse<T>, eta: usize, sigma: T) -> T {
    let nd = h.direct_index() as isize;
    let taps = h.taps();
    let eta = eta as isize;
    (-eta..=eta)
        .map(|n| {
            let idx = n + nd;
            let v = if idx >= 0 && (idx as usize) < taps.len() {
                taps[idx as usize]
            } else {
                T::zero()
            };
            let w = sinc(T::from_isize(n).unwrap() + sigma) * v;
            w * w
        })
        .sum()
}

/// Direct-path energy: the best sinc-weighted energy over the offset grid.
pub fn direct_path_energy<T: Real>(h: &ImpulseResponse<T>, params: &DrrParams) -> T {
    params
        .sigma_grid()
        .into_iter()
        .map(|s| direct_energy_at(h, params.eta, T::lit(s)))
        .fold(T::zero(), T::max)
}

/// A decibel value that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decibels<T> {
    /// May be `+inf`.
    pub db: T,
}

impl<T: Real> Decibels<T> {
    pub fn is_infinite(&self) -> bool {
        self.db.is_infinite()
    }

    /// Value clipped to `+DB_CAP`, with a flag when clipping happened.
    pub fn capped(&self) -> (T, bool) {
        let cap = T::lit(DB_CAP);
        if self.db > cap {
            (cap, true)
        } else {
            (self.db, false)
        }
    }
}

/// DRR in dB averaged over probe responses (one per in-hop offset). Pass
/// copies of the same response for a time-invariant channel. Infinite when
/// any response has no reverberant energy.
pub fn drr<T: Real>(per_shift: &[ImpulseResponse<T>], params: &DrrParams) -> Result<Decibels<T>> {
    if per_shift.is_empty() {
        return Err(Error::InvalidImpulseResponse("no responses".into()));
    }
    let ten = T::lit(10.0);
    let mut sum = T::zero();
    for h in per_shift {
        let total = h.energy();
        if total <= T::zero() {
            return Err(Error::InvalidImpulseResponse("zero-energy response".into()));
        }
        let ed = direct_path_energy(h, params);
        let rest = total - ed;
        if rest <= T::zero() {
            return Ok(Decibels { db: T::infinity() });
        }
        sum = sum + (ed / rest).log10();
    }
    Ok(Decibels {
        db: ten * sum / T::from_usize_lossy(per_shift.len()),
    })
}

/// DRR of a single time-invariant response.
pub fn drr_single<T: Real>(h: &ImpulseResponse<T>, params: &DrrParams) -> Result<Decibels<T>> {
    drr(std::slice::from_ref(h), params)
}

/// Segmental SRR result.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport<T> {
    /// Mean of `per_frame_srr`.
    pub srr_db: T,
    /// SRR of every non-silent frame, each capped at `+DB_CAP`.
    pub per_frame_srr: Vec<T>,
    pub frames_counted: usize,
    /// Frames whose error was zero and were capped.
    pub capped_frames: usize,
    /// Every counted frame matched exactly.
    pub perfect_match: bool,
}

/// Segmental SRR of `estimate` against the direct-path signal `reference`.
///
/// Frames start every `R` samples and span `Q*R` samples; the shorter signal
/// is zero-padded and the last frame may run past the end. Frames where the
/// reference is silent are excluded.
pub fn srr_seg<T: Real>(
    reference: &Signal<T>,
    estimate: &Signal<T>,
    config: &StftConfig<T>,
) -> Result<MetricReport<T>> {
    srr_seg_raw(reference.samples(), estimate.samples(), config.hop(), config.frame_len())
}

/// [`srr_seg`] on raw sample slices with explicit hop and frame length.
pub fn srr_seg_raw<T: Real>(
    reference: &[T],
    estimate: &[T],
    hop: usize,
    frame_len: usize,
) -> Result<MetricReport<T>> {
    let len = reference.len().max(estimate.len());
    if len == 0 {
        return Err(Error::EmptySignal);
    }
    let at = |s: &[T], i: usize| s.get(i).copied().unwrap_or_else(T::zero);
    let n_frames = if len <= frame_len {
        1
    } else {
        1 + (len - frame_len).div_ceil(hop)
    };
    let cap = T::lit(DB_CAP);
    let ten = T::lit(10.0);
    let mut per_frame = Vec::with_capacity(n_frames);
    let mut capped = 0;
    for f in 0..n_frames {
        let start = f * hop;
        let mut sig = T::zero();
        let mut err = T::zero();
        for i in start..start + frame_len {
            let d = at(reference, i);
            let e = d - at(estimate, i);
            sig = sig + d * d;
            err = err + e * e;
        }
        if sig == T::zero() {
            continue;
        }
        let v = if err == T::zero() {
            cap
        } else {
            (ten * (sig / err).log10()).min(cap)
        };
        if v >= cap {
            capped += 1;
        }
        per_frame.push(v);
    }
    if per_frame.is_empty() {
        return Err(Error::AllSilent);
    }
    let counted = per_frame.len();
    let mean = per_frame.iter().copied().sum::<T>() / T::from_usize_lossy(counted);
    Ok(MetricReport {
        srr_db: mean,
        frames_counted: counted,
        capped_frames: capped,
        perfect_match: capped == counted,
        per_frame_srr: per_frame,
    })
}
