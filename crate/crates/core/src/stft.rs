//! Windowed STFT analysis, inverse-DFT synthesis with overlap-add, and the
//! inter-frame filter that combines neighbouring frames per frequency bin.
//!
//! Frames are labelled by a signed index `l`; frame `l` covers samples
//! `l*R .. l*R + Q*R - 1` and samples outside the signal read as zero. The DFT
//! size equals the frame length `Q*R`. Analysis and synthesis use the same
//! window, so perfect reconstruction requires `sum_q w[qR+n]^2 = 1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter_bank::FilterBank;
use crate::scalar::{cmax_abs, Real};
use crate::signal::Signal;

/// Largest relative conjugate-symmetry violation `synthesize` accepts.
pub const SYMMETRY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// Periodic square-root Hann scaled to satisfy the reconstruction
    /// condition. With `Q = 1` the only admissible window is all ones.
    SqrtHann,
    /// Constant `1/sqrt(Q)`.
    RectangularScaled,
}

impl WindowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::SqrtHann => "sqrt-hann",
            WindowKind::RectangularScaled => "rectangular-scaled",
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt-hann" => Ok(WindowKind::SqrtHann),
            "rectangular-scaled" => Ok(WindowKind::RectangularScaled),
            other => Err(Error::UnsupportedWindow(other.to_string())),
        }
    }
}

struct Plans<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Time-frequency grid: overlap factor `Q`, hop `R`, and a window of `Q*R`
/// samples satisfying the reconstruction condition. Cheap to clone.
#[derive(Clone)]
pub struct StftConfig<T: Real> {
    overlap: usize,
    hop: usize,
    kind: Option<WindowKind>,
    window: Arc<[T]>,
    plans: Arc<Plans<T>>,
}

impl<T: Real> fmt::Debug for StftConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StftConfig")
            .field("overlap", &self.overlap)
            .field("hop", &self.hop)
            .field("kind", &self.kind)
            .finish()
    }
}

impl<T: Real> PartialEq for StftConfig<T> {
    fn eq(&self, other: &Self) -> bool {
        self.overlap == other.overlap && self.hop == other.hop && self.window == other.window
    }
}

/// Builds a shipped window family for overlap `q` and hop `r`.
pub fn make_window<T: Real>(kind: WindowKind, q: usize, r: usize) -> Result<StftConfig<T>> {
    if q < 1 || r < 1 {
        return Err(Error::InvalidConfig(format!(
            "overlap and hop must be at least 1 (got Q={q}, R={r})"
        )));
    }
    let n = q * r;
    let window: Vec<T> = match kind {
        WindowKind::RectangularScaled => {
            vec![T::one() / T::from_usize_lossy(q).sqrt(); n]
        }
        WindowKind::SqrtHann if q == 1 => vec![T::one(); n],
        WindowKind::SqrtHann => {
            let scale = (T::lit(2.0) / T::from_usize_lossy(q)).sqrt();
            let len = T::from_usize_lossy(n);
            (0..n)
                .map(|i| scale * (T::PI() * T::from_usize_lossy(i) / len).sin())
                .collect()
        }
    };
    let mut config = StftConfig::with_window(q, r, window)?;
    config.kind = Some(kind);
    Ok(config)
}

impl<T: Real> StftConfig<T> {
    /// Uses a caller-supplied window, which must satisfy the reconstruction
    /// condition.
    pub fn with_window(q: usize, r: usize, window: Vec<T>) -> Result<Self> {
        if q < 1 || r < 1 {
            return Err(Error::InvalidConfig(format!(
                "overlap and hop must be at least 1 (got Q={q}, R={r})"
            )));
        }
        if window.len() != q * r {
            return Err(Error::InvalidConfig(format!(
                "window length {} differs from Q*R = {}",
                window.len(),
                q * r
            )));
        }
        let (deviation, offset) = reconstruction_deviation(&window, q, r);
        let tol = (T::epsilon().to_f64_lossy() * 16.0).max(1e-12);
        if deviation > tol {
            return Err(Error::WindowCondition { deviation, offset });
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(q * r),
            inverse: planner.plan_fft_inverse(q * r),
        };
        Ok(Self {
            overlap: q,
            hop: r,
            kind: None,
            window: window.into(),
            plans: Arc::new(plans),
        })
    }

    /// Overlap factor `Q`.
    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// Hop `R`.
    pub fn hop(&self) -> usize {
        self.hop
    }

    /// Frame length and DFT size, `Q*R`.
    pub fn frame_len(&self) -> usize {
        self.overlap * self.hop
    }

    pub fn n_bins(&self) -> usize {
        self.frame_len()
    }

    pub fn window(&self) -> &[T] {
        &self.window
    }

    pub fn kind(&self) -> Option<WindowKind> {
        self.kind
    }

    /// `max_n |sum_q w[qR+n]^2 - 1|`.
    pub fn condition_deviation(&self) -> f64 {
        reconstruction_deviation(&self.window, self.overlap, self.hop).0
    }

    /// First and last frame labels touched by a signal occupying samples
    /// `0..len`.
    pub fn frame_span(&self, len: usize) -> (isize, isize) {
        let first = 1 - self.overlap as isize;
        let last = ((len.max(1) - 1) / self.hop) as isize;
        (first, last)
    }
}

/// Returns the worst deviation of the squared-window sum from one and the hop
/// offset where it occurs. Evaluated in `f64`.
pub fn reconstruction_deviation<T: Real>(window: &[T], q: usize, r: usize) -> (f64, usize) {
    let mut worst = (0.0, 0);
    for n in 0..r {
        let sum: f64 = (0..q)
            .map(|i| {
                let w = window[i * r + n].to_f64_lossy();
                w * w
            })
            .sum();
        let dev = (sum - 1.0).abs();
        if dev > worst.0 || dev.is_nan() {
            worst = (dev, n);
        }
    }
    worst
}

/// Complex frames x bins array with signed frame labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram<T: Real> {
    data: Vec<Complex<T>>,
    n_frames: usize,
    first_frame: isize,
    sample_rate: u32,
    config: StftConfig<T>,
}

impl<T: Real> Spectrogram<T> {
    /// All-zero spectrogram over frames `first..=last`.
    pub fn zeros(config: &StftConfig<T>, first: isize, last: isize, sample_rate: u32) -> Self {
        let n_frames = (last - first + 1).max(0) as usize;
        Self {
            data: vec![Complex::new(T::zero(), T::zero()); n_frames * config.n_bins()],
            n_frames,
            first_frame: first,
            sample_rate,
            config: config.clone(),
        }
    }

    pub fn from_frames(
        config: &StftConfig<T>,
        first: isize,
        frames: Vec<Vec<Complex<T>>>,
        sample_rate: u32,
    ) -> Result<Self> {
        let n_bins = config.n_bins();
        let n_frames = frames.len();
        let mut data = Vec::with_capacity(n_frames * n_bins);
        for (i, f) in frames.into_iter().enumerate() {
            if f.len() != n_bins {
                return Err(Error::DimensionMismatch(format!(
                    "frame {i} has {} bins, expected {n_bins}",
                    f.len()
                )));
            }
            data.extend(f);
        }
        Ok(Self {
            data,
            n_frames,
            first_frame: first,
            sample_rate,
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &StftConfig<T> {
        &self.config
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_bins(&self) -> usize {
        self.config.n_bins()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Label of the first stored frame.
    pub fn first_frame(&self) -> isize {
        self.first_frame
    }

    /// Label of the last stored frame.
    pub fn last_frame(&self) -> isize {
        self.first_frame + self.n_frames as isize - 1
    }

    /// Row index of the frame labelled `l = 0` (may lie outside the stored
    /// rows).
    pub fn frame_offset(&self) -> isize {
        -self.first_frame
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Frame by row index.
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        let n = self.n_bins();
        &self.data[i * n..(i + 1) * n]
    }

    /// Frame by label, `None` when outside the stored span.
    pub fn frame(&self, l: isize) -> Option<&[Complex<T>]> {
        let i = l - self.first_frame;
        (i >= 0 && (i as usize) < self.n_frames).then(|| self.row(i as usize))
    }

    /// Value at frame label `l` and bin `k`; zero outside the stored span.
    pub fn get(&self, l: isize, k: usize) -> Complex<T> {
        self.frame(l)
            .map(|f| f[k])
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn max_abs(&self) -> T {
        cmax_abs(&self.data)
    }

    /// Relative deviation from `X[l,k] = conj(X[l, N-k])`.
    pub fn symmetry_deviation(&self) -> T {
        let n = self.n_bins();
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..self.n_frames {
            let f = self.row(i);
            for k in 0..n {
                let d = (f[k] - f[(n - k) % n].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Copy re-framed onto `first..=last`, zero-filling or dropping frames.
    pub fn reframed(&self, first: isize, last: isize) -> Self {
        let mut out = Self::zeros(&self.config, first, last, self.sample_rate);
        let n = self.n_bins();
        for l in first..=last {
            if let Some(src) = self.frame(l) {
                let i = (l - first) as usize;
                out.data[i * n..(i + 1) * n].copy_from_slice(src);
            }
        }
        out
    }

    /// Element-wise `self - other` over the union of both frame spans.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.n_bins() != other.n_bins() {
            return Err(Error::DimensionMismatch(format!(
                "bin counts {} and {}",
                self.n_bins(),
                other.n_bins()
            )));
        }
        let first = self.first_frame.min(other.first_frame);
        let last = self.last_frame().max(other.last_frame());
        let mut out = self.reframed(first, last);
        let n = self.n_bins();
        for l in other.first_frame..=other.last_frame() {
            let i = (l - first) as usize;
            for (o, &v) in out.data[i * n..(i + 1) * n]
                .iter_mut()
                .zip(other.frame(l).unwrap())
            {
                *o = *o - v;
            }
        }
        Ok(out)
    }

    /// `sum |X|^2` over all frames and bins.
    pub fn power(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }
}

/// STFT of `signal` over every frame that touches it, `l = 1-Q ..= (N-1)/R`.
pub fn analyze<T: Real>(signal: &Signal<T>, config: &StftConfig<T>) -> Result<Spectrogram<T>> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let (first, last) = config.frame_span(signal.len());
    Ok(analyze_frames(
        signal.samples(),
        config,
        first,
        last,
        signal.sample_rate(),
    ))
}

/// STFT of samples (sample 0 at time 0) over frame labels `first..=last`.
pub fn analyze_frames<T: Real>(
    samples: &[T],
    config: &StftConfig<T>,
    first: isize,
    last: isize,
    sample_rate: u32,
) -> Spectrogram<T> {
    let mut spec = Spectrogram::zeros(config, first, last, sample_rate);
    let n = config.frame_len();
    let hop = config.hop() as isize;
    let window = config.window();
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); config.plans.forward.get_inplace_scratch_len()];
    for (i, frame) in spec.data.chunks_exact_mut(n).enumerate() {
        let start = (first + i as isize) * hop;
        let mut touched = false;
        for (m, slot) in frame.iter_mut().enumerate() {
            let t = start + m as isize;
            if t >= 0 && (t as usize) < samples.len() {
                let v = samples[t as usize] * window[m];
                touched |= v != T::zero();
                *slot = Complex::new(v, T::zero());
            }
        }
        if touched {
            config.plans.forward.process_with_scratch(frame, &mut scratch);
        }
    }
    spec
}

/// Overlap-added output of a spectrogram over its full support. Returns the
/// time index of the first sample and the samples.
pub fn synthesize_span<T: Real>(spec: &Spectrogram<T>) -> Result<(isize, Vec<T>)> {
    let dev = spec.symmetry_deviation();
    if dev.to_f64_lossy() > SYMMETRY_TOLERANCE {
        return Err(Error::NotConjugateSymmetric(dev.to_f64_lossy()));
    }
    let config = spec.config();
    let n = config.frame_len();
    let hop = config.hop();
    let start = spec.first_frame() * hop as isize;
    let len = if spec.n_frames() == 0 {
        0
    } else {
        (spec.n_frames() - 1) * hop + n
    };
    let mut out = vec![T::zero(); len];
    let inv_n = T::one() / T::from_usize_lossy(n);
    let window = config.window();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    let mut scratch =
        vec![Complex::new(T::zero(), T::zero()); config.plans.inverse.get_inplace_scratch_len()];
    for i in 0..spec.n_frames() {
        let row = spec.row(i);
        if row.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
            continue;
        }
        buf.copy_from_slice(row);
        config.plans.inverse.process_with_scratch(&mut buf, &mut scratch);
        let base = i * hop;
        for (m, z) in buf.iter().enumerate() {
            out[base + m] = out[base + m] + z.re * inv_n * window[m];
        }
    }
    Ok((start, out))
}

/// Overlap-added output from time 0 to the end of its support. Negative-time
/// samples are dropped.
pub fn synthesize<T: Real>(spec: &Spectrogram<T>) -> Result<Signal<T>> {
    let (start, samples) = synthesize_span(spec)?;
    let skip = (-start).max(0) as usize;
    let lead = start.max(0) as usize;
    let mut out = vec![T::zero(); lead];
    out.extend(samples.into_iter().skip(skip));
    Signal::new(out, spec.sample_rate())
}

/// Overlap-added output trimmed (or zero-padded) to `len` samples from time 0.
pub fn synthesize_to_len<T: Real>(spec: &Spectrogram<T>, len: usize) -> Result<Signal<T>> {
    Ok(synthesize(spec)?.resized(len))
}

/// Inter-frame filter: `S[l,k] = sum_{r=-A}^{B} G_k[r] Y[l-r,k]`.
///
/// The output spans `A` frames before and `B` frames after the input.
pub fn apply_filter_bank<T: Real>(
    spec: &Spectrogram<T>,
    bank: &FilterBank<T>,
) -> Result<Spectrogram<T>> {
    let n = spec.n_bins();
    if bank.n_bins() != n {
        return Err(Error::DimensionMismatch(format!(
            "filter bank has {} bins, spectrogram has {n}",
            bank.n_bins()
        )));
    }
    let a = bank.future() as isize;
    let b = bank.past() as isize;
    let taps = bank.taps();
    let n_in = spec.n_frames();
    let mut out = Spectrogram::zeros(
        spec.config(),
        spec.first_frame() - a,
        spec.last_frame() + b,
        spec.sample_rate(),
    );
    let n_out = out.n_frames();
    for k in 0..n {
        let g = bank.bin(k);
        for i_out in 0..n_out {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, &c) in g.iter().enumerate().take(taps) {
                // coefficient j is r = j - A and reads input row i_out - j
                if let Some(i_in) = i_out.checked_sub(j).filter(|&i| i < n_in) {
                    acc = acc + c * spec.data[i_in * n + k];
                }
            }
            out.data[i_out * n + k] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter_bank::FilterBank;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn window_examples() {
        let rect: StftConfig<f64> = make_window(WindowKind::RectangularScaled, 1, 64).unwrap();
        assert_eq!(rect.window(), &[1.0; 64][..]);
        let rect4: StftConfig<f64> = make_window(WindowKind::RectangularScaled, 4, 64).unwrap();
        assert!(rect4.window().iter().all(|&w| w == 0.5));
        assert_eq!(rect4.condition_deviation(), 0.0);

        let hann: StftConfig<f64> = make_window(WindowKind::SqrtHann, 4, 64).unwrap();
        assert_eq!(hann.window().len(), 256);
        // independent evaluation of the condition sum
        for n in 0..64 {
            let s: f64 = (0..4)
                .map(|q| {
                    let x = (std::f64::consts::PI * (q * 64 + n) as f64 / 256.0).sin();
                    0.5 * x * x
                })
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
            let s2: f64 = (0..4).map(|q| hann.window()[q * 64 + n].powi(2)).sum();
            assert!((s2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn window_errors() {
        assert!(make_window::<f64>(WindowKind::SqrtHann, 0, 4).is_err());
        assert!(make_window::<f64>(WindowKind::SqrtHann, 2, 0).is_err());
        assert!("hamming".parse::<WindowKind>().is_err());
        assert_eq!("sqrt-hann".parse::<WindowKind>().unwrap(), WindowKind::SqrtHann);
        let bad = StftConfig::with_window(2, 2, vec![1.0f64, 1.0, 1.0, 1.0]);
        assert!(matches!(bad, Err(Error::WindowCondition { .. })));
        assert!(StftConfig::with_window(2, 2, vec![1.0f64; 3]).is_err());
    }

    #[test]
    fn zero_signal_gives_zero_spectrogram() {
        let cfg: StftConfig<f64> = make_window(WindowKind::SqrtHann, 4, 64).unwrap();
        let x = Signal::new(vec![0.0; 512], 16000).unwrap();
        let s = analyze(&x, &cfg).unwrap();
        assert_eq!(s.first_frame(), -3);
        assert_eq!(s.last_frame(), 7);
        assert_eq!(s.frame_offset(), 3);
        assert_eq!(s.max_abs(), 0.0);
        let y = synthesize(&s).unwrap();
        assert!(y.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_analysis_and_synthesis() {
        let cfg: StftConfig<f64> = make_window(WindowKind::RectangularScaled, 1, 4).unwrap();
        let x = Signal::new(vec![1.0], 8000).unwrap();
        let s = analyze(&x, &cfg).unwrap();
        assert_eq!((s.first_frame(), s.last_frame()), (0, 0));
        for k in 0..4 {
            assert!((s.get(0, k) - c(1.0, 0.0)).norm() < 1e-15);
        }
        let frames = vec![vec![c(1.0, 0.0); 4]];
        let spec = Spectrogram::from_frames(&cfg, 0, frames, 8000).unwrap();
        let y = synthesize(&spec).unwrap();
        assert_eq!(y.len(), 4);
        assert!((y.samples()[0] - 1.0).abs() < 1e-15);
        assert!(y.samples()[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn constant_frame_puts_energy_in_dc() {
        let cfg: StftConfig<f64> = make_window(WindowKind::RectangularScaled, 1, 16).unwrap();
        let x = Signal::new(vec![1.0; 16], 8000).unwrap();
        let s = analyze(&x, &cfg).unwrap();
        assert!((s.get(0, 0) - c(16.0, 0.0)).norm() < 1e-12);
        for k in 1..16 {
            assert!(s.get(0, k).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesize_rejects_asymmetric_input() {
        let cfg: StftConfig<f64> = make_window(WindowKind::RectangularScaled, 1, 4).unwrap();
        let frames = vec![vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]];
        let spec = Spectrogram::from_frames(&cfg, 0, frames, 8000).unwrap();
        assert!(matches!(synthesize(&spec), Err(Error::NotConjugateSymmetric(_))));
        assert!(analyze(&Signal::new(Vec::new(), 8000).unwrap(), &cfg).is_err());
    }

    #[test]
    fn round_trip_trimmed() {
        let cfg: StftConfig<f64> = make_window(WindowKind::SqrtHann, 4, 8).unwrap();
        let x: Vec<f64> = (0..100).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let sig = Signal::new(x.clone(), 8000).unwrap();
        let y = synthesize_to_len(&analyze(&sig, &cfg).unwrap(), x.len()).unwrap();
        for (a, b) in x.iter().zip(y.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn single_bin_frame_convolution() {
        // Y_0 = [1, 1, 1], G_0 = [0.5, 0.5] over r in {0, 1}
        let cfg: StftConfig<f64> = make_window(WindowKind::RectangularScaled, 1, 2).unwrap();
        let frames = vec![vec![c(1.0, 0.0), c(0.0, 0.0)]; 3];
        let spec = Spectrogram::from_frames(&cfg, 0, frames, 8000).unwrap();
        let bank = FilterBank::from_half_spectrum(
            &cfg,
            0,
            1,
            vec![vec![c(0.5, 0.0), c(0.5, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]],
        )
        .unwrap();
        let out = apply_filter_bank(&spec, &bank).unwrap();
        assert_eq!((out.first_frame(), out.last_frame()), (0, 3));
        let got: Vec<f64> = (0..4).map(|l| out.get(l, 0).re).collect();
        assert_eq!(got, vec![0.5, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn delta_banks_identity_and_shift() {
        let cfg: StftConfig<f64> = make_window(WindowKind::SqrtHann, 2, 4).unwrap();
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let spec = analyze(&Signal::new(x, 8000).unwrap(), &cfg).unwrap();

        let id = FilterBank::delta(&cfg, 2, 3);
        let out = apply_filter_bank(&spec, &id).unwrap();
        assert_eq!(out.first_frame(), spec.first_frame() - 2);
        assert_eq!(out.last_frame(), spec.last_frame() + 3);
        for l in out.first_frame()..=out.last_frame() {
            for k in 0..8 {
                assert_eq!(out.get(l, k), spec.get(l, k));
            }
        }

        let shift = FilterBank::shift(&cfg, 0, 2, 1);
        let out = apply_filter_bank(&spec, &shift).unwrap();
        for l in out.first_frame()..=out.last_frame() {
            for k in 0..8 {
                assert_eq!(out.get(l, k), spec.get(l - 1, k));
            }
        }
    }

    #[test]
    fn bin_mismatch_is_an_error() {
        let a: StftConfig<f64> = make_window(WindowKind::SqrtHann, 2, 4).unwrap();
        let b: StftConfig<f64> = make_window(WindowKind::SqrtHann, 2, 8).unwrap();
        let spec = analyze(&Signal::new(vec![1.0; 10], 8000).unwrap(), &a).unwrap();
        let bank = FilterBank::delta(&b, 1, 1);
        assert!(matches!(
            apply_filter_bank(&spec, &bank),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn f32_round_trip() {
        let cfg: StftConfig<f32> = make_window(WindowKind::SqrtHann, 4, 16).unwrap();
        let x: Vec<f32> = (0..300).map(|i| (i as f32 * 0.11).cos()).collect();
        let sig = Signal::new(x.clone(), 8000).unwrap();
        let y = synthesize_to_len(&analyze(&sig, &cfg).unwrap(), x.len()).unwrap();
        for (a, b) in x.iter().zip(y.samples()) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}
