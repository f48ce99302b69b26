//! Per-bin complex inter-frame coefficients `G_k[r]`, `r = -A..=B`, and their
//! JSON file format.
//!
//! # File layout (version 1)
//!
//! ```json
//! {
//!   "format": "stft-dereverb-filter-bank",
//!   "version": 1,
//!   "overlap": 4, "hop": 64,
//!   "window": "sqrt-hann",
//!   "window_samples": null,
//!   "future": 9, "past": 9,
//!   "bins": 256,
//!   "coefficients": [[re(-A), im(-A), ..., re(B), im(B)], ...]
//! }
//! ```
//!
//! `coefficients` holds one row per bin `k = 0..bins`, each with
//! `2*(A+B+1)` numbers. `window_samples` is only set for custom windows, in
//! which case `window` is null. Numbers are written as shortest round-trip
//! decimal `f64`, so save/load is bit-exact.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stft::{make_window, StftConfig, WindowKind};

pub const FORMAT_NAME: &str = "stft-dereverb-filter-bank";
pub const FORMAT_VERSION: u32 = 1;

/// Tolerance on conjugate symmetry when loading full-spectrum coefficients.
const LOAD_SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank<T: Real> {
    future: usize,
    past: usize,
    coeffs: Vec<Complex<T>>,
    config: StftConfig<T>,
}

impl<T: Real> FilterBank<T> {
    /// Builds a bank from rows for bins `0..=N/2`; the rest are mirrored as
    /// `G_k = conj(G_{N-k})`. Bin 0 and (for even `N`) bin `N/2` are forced
    /// real.
    pub fn from_half_spectrum(
        config: &StftConfig<T>,
        future: usize,
        past: usize,
        half: Vec<Vec<Complex<T>>>,
    ) -> Result<Self> {
        let n = config.n_bins();
        let taps = future + past + 1;
        if half.len() != n / 2 + 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} half-spectrum rows, got {}",
                n / 2 + 1,
                half.len()
            )));
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); n * taps];
        for (k, row) in half.into_iter().enumerate() {
            if row.len() != taps {
                return Err(Error::DimensionMismatch(format!(
                    "bin {k} has {} coefficients, expected {taps}",
                    row.len()
                )));
            }
            let self_mirror = (n - k) % n == k;
            for (j, c) in row.into_iter().enumerate() {
                let c = if self_mirror {
                    Complex::new(c.re, T::zero())
                } else {
                    c
                };
                coeffs[k * taps + j] = c;
                if !self_mirror {
                    coeffs[(n - k) * taps + j] = c.conj();
                }
            }
        }
        Ok(Self {
            future,
            past,
            coeffs,
            config: config.clone(),
        })
    }

    /// Builds a bank from all `N` rows, checking conjugate symmetry.
    pub fn from_full_spectrum(
        config: &StftConfig<T>,
        future: usize,
        past: usize,
        rows: Vec<Vec<Complex<T>>>,
    ) -> Result<Self> {
        let n = config.n_bins();
        let taps = future + past + 1;
        if rows.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} coefficient rows, got {}",
                rows.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(n * taps);
        for (k, row) in rows.into_iter().enumerate() {
            if row.len() != taps {
                return Err(Error::DimensionMismatch(format!(
                    "bin {k} has {} coefficients, expected {taps}",
                    row.len()
                )));
            }
            coeffs.extend(row);
        }
        let bank = Self {
            future,
            past,
            coeffs,
            config: config.clone(),
        };
        let dev = bank.symmetry_deviation().to_f64_lossy();
        if dev > LOAD_SYMMETRY_TOLERANCE {
            return Err(Error::NotConjugateSymmetric(dev));
        }
        Ok(bank)
    }

    pub fn zeros(config: &StftConfig<T>, future: usize, past: usize) -> Self {
        let taps = future + past + 1;
        Self {
            future,
            past,
            coeffs: vec![Complex::new(T::zero(), T::zero()); config.n_bins() * taps],
            config: config.clone(),
        }
    }

    /// `G_k[r] = delta[r - shift]` for every bin.
    pub fn shift(config: &StftConfig<T>, future: usize, past: usize, shift: isize) -> Self {
        let mut bank = Self::zeros(config, future, past);
        let j = shift + future as isize;
        if j >= 0 && (j as usize) < bank.taps() {
            let taps = bank.taps();
            for k in 0..config.n_bins() {
                bank.coeffs[k * taps + j as usize] = Complex::new(T::one(), T::zero());
            }
        }
        bank
    }

    /// Identity bank, `G_k[r] = delta[r]`.
    pub fn delta(config: &StftConfig<T>, future: usize, past: usize) -> Self {
        Self::shift(config, future, past, 0)
    }

    /// Number of future frames `A`.
    pub fn future(&self) -> usize {
        self.future
    }

    /// Number of past frames `B`.
    pub fn past(&self) -> usize {
        self.past
    }

    /// Coefficients per bin, `A + B + 1`.
    pub fn taps(&self) -> usize {
        self.future + self.past + 1
    }

    pub fn n_bins(&self) -> usize {
        self.config.n_bins()
    }

    pub fn config(&self) -> &StftConfig<T> {
        &self.config
    }

    /// Row `G_k[-A..=B]`.
    pub fn bin(&self, k: usize) -> &[Complex<T>] {
        let t = self.taps();
        &self.coeffs[k * t..(k + 1) * t]
    }

    /// `G_k[r]`, zero when `r` is outside `-A..=B`.
    pub fn coeff(&self, k: usize, r: isize) -> Complex<T> {
        let j = r + self.future as isize;
        if j < 0 || j as usize >= self.taps() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.bin(k)[j as usize]
        }
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Largest `|G_k[r] - conj(G_{N-k}[r])|` relative to the largest
    /// coefficient.
    pub fn symmetry_deviation(&self) -> T {
        let n = self.n_bins();
        let scale = self.coeffs.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for k in 0..n {
            for (a, b) in self.bin(k).iter().zip(self.bin((n - k) % n)) {
                worst = worst.max((*a - b.conj()).norm());
            }
        }
        worst / scale
    }

    pub fn to_file(&self) -> FilterBankFile {
        let kind = self.config.kind();
        FilterBankFile {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            overlap: self.config.overlap(),
            hop: self.config.hop(),
            window: kind,
            window_samples: match kind {
                Some(_) => None,
                None => Some(
                    self.config
                        .window()
                        .iter()
                        .map(|w| w.to_f64_lossy())
                        .collect(),
                ),
            },
            future: self.future,
            past: self.past,
            bins: self.n_bins(),
            coefficients: (0..self.n_bins())
                .map(|k| {
                    self.bin(k)
                        .iter()
                        .flat_map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_file(file: &FilterBankFile) -> Result<Self> {
        if file.format != FORMAT_NAME {
            return Err(Error::Format(format!("unexpected format `{}`", file.format)));
        }
        if file.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        let config = match (&file.window, &file.window_samples) {
            (Some(kind), _) => make_window(*kind, file.overlap, file.hop)?,
            (None, Some(samples)) => StftConfig::with_window(
                file.overlap,
                file.hop,
                samples.iter().map(|&w| T::lit(w)).collect(),
            )?,
            (None, None) => return Err(Error::Format("missing window".into())),
        };
        if file.bins != config.n_bins() {
            return Err(Error::Format(format!(
                "bins = {} but Q*R = {}",
                file.bins,
                config.n_bins()
            )));
        }
        let taps = file.future + file.past + 1;
        let mut rows = Vec::with_capacity(file.bins);
        for (k, row) in file.coefficients.iter().enumerate() {
            if row.len() != 2 * taps {
                return Err(Error::Format(format!(
                    "bin {k}: {} numbers, expected {}",
                    row.len(),
                    2 * taps
                )));
            }
            rows.push(
                row.chunks_exact(2)
                    .map(|p| Complex::new(T::lit(p[0]), T::lit(p[1])))
                    .collect(),
            );
        }
        Self::from_full_spectrum(&config, file.future, file.past, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("filter bank serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FilterBankFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk representation of a [`FilterBank`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterBankFile {
    pub format: String,
    pub version: u32,
    pub overlap: usize,
    pub hop: usize,
    pub window: Option<WindowKind>,
    pub window_samples: Option<Vec<f64>>,
    pub future: usize,
    pub past: usize,
    pub bins: usize,
    pub coefficients: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> StftConfig<f64> {
        make_window(WindowKind::SqrtHann, 2, 4).unwrap()
    }

    #[test]
    fn mirrored_construction_is_symmetric() {
        let c = cfg();
        let half: Vec<Vec<Complex<f64>>> = (0..5)
            .map(|k| vec![Complex::new(k as f64, 0.5), Complex::new(-1.0, k as f64)])
            .collect();
        let bank = FilterBank::from_half_spectrum(&c, 1, 0, half).unwrap();
        assert_eq!(bank.symmetry_deviation(), 0.0);
        assert_eq!(bank.coeff(0, -1).im, 0.0);
        assert_eq!(bank.coeff(4, 0).im, 0.0);
        assert_eq!(bank.coeff(7, -1), Complex::new(1.0, -0.5));
        assert_eq!(bank.coeff(3, 5), Complex::new(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_files() {
        let bank = FilterBank::delta(&cfg(), 1, 1);
        let mut file = bank.to_file();
        file.version = 7;
        assert!(FilterBank::<f64>::from_file(&file).is_err());
        let mut file = bank.to_file();
        file.coefficients[1][0] = 3.0;
        assert!(matches!(
            FilterBank::<f64>::from_file(&file),
            Err(Error::NotConjugateSymmetric(_))
        ));
        let mut file = bank.to_file();
        file.coefficients[2].pop();
        assert!(FilterBank::<f64>::from_file(&file).is_err());
        assert!(FilterBank::<f64>::from_json("{").is_err());
    }

    #[test]
    fn custom_window_round_trip() {
        let w = vec![0.5f64; 8];
        let c = StftConfig::with_window(4, 2, w).unwrap();
        let bank = FilterBank::delta(&c, 0, 2);
        let back = FilterBank::<f64>::from_json(&bank.to_json()).unwrap();
        assert_eq!(back, bank);
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(
            vals in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 5 * 3)
        ) {
            let c = cfg();
            let half: Vec<Vec<Complex<f64>>> = vals
                .chunks(3)
                .map(|ch| ch.iter().map(|&(re, im)| Complex::new(re, im)).collect())
                .collect();
            let bank = FilterBank::from_half_spectrum(&c, 1, 1, half).unwrap();
            let text = bank.to_json();
            let back = FilterBank::<f64>::from_json(&text).unwrap();
            prop_assert_eq!(back.coefficients(), bank.coefficients());
            prop_assert_eq!(back.to_json(), text);
        }
    }
}
