use crate::error::{Error, Result};
use crate::scalar::{convolve, energy, Real};

/// Real-valued time-domain samples with their sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    samples: Vec<T>,
    sample_rate: u32,
}

impl<T: Real> Signal<T> {
    /// Rejects NaN and infinite samples.
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Result<Self> {
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> T {
        energy(&self.samples)
    }

    /// Convolves with a channel, producing the full-length observation.
    pub fn convolve(&self, h: &ImpulseResponse<T>) -> Signal<T> {
        Signal {
            samples: convolve(&self.samples, h.taps()),
            sample_rate: self.sample_rate,
        }
    }

    /// Truncates or zero-pads to `len` samples.
    pub fn resized(&self, len: usize) -> Signal<T> {
        let mut samples = self.samples.clone();
        samples.resize(len, T::zero());
        Signal {
            samples,
            sample_rate: self.sample_rate,
        }
    }
}

/// Finite channel response `h[0..M-1]` with the index of its direct path.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse<T> {
    taps: Vec<T>,
    sample_rate: u32,
    direct_index: usize,
}

impl<T: Real> ImpulseResponse<T> {
    /// Builds a response whose direct path is the largest-magnitude tap.
    pub fn new(taps: Vec<T>, sample_rate: u32) -> Result<Self> {
        let direct_index = Self::validate(&taps)?;
        Ok(Self {
            taps,
            sample_rate,
            direct_index,
        })
    }

    /// Builds a response with an explicit direct-path index.
    pub fn with_direct_index(taps: Vec<T>, sample_rate: u32, direct_index: usize) -> Result<Self> {
        Self::validate(&taps)?;
        if direct_index >= taps.len() {
            return Err(Error::InvalidImpulseResponse(format!(
                "direct index {direct_index} outside 0..{}",
                taps.len()
            )));
        }
        Ok(Self {
            taps,
            sample_rate,
            direct_index,
        })
    }

    fn validate(taps: &[T]) -> Result<usize> {
        if taps.is_empty() {
            return Err(Error::InvalidImpulseResponse("no taps".into()));
        }
        if let Some(i) = taps.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(argmax_abs(taps))
    }

    /// Unit impulse delayed by `delay` samples.
    pub fn delta(delay: usize, sample_rate: u32) -> Self {
        let mut taps = vec![T::zero(); delay + 1];
        taps[delay] = T::one();
        Self {
            taps,
            sample_rate,
            direct_index: delay,
        }
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn direct_index(&self) -> usize {
        self.direct_index
    }

    pub fn direct_amplitude(&self) -> T {
        self.taps[self.direct_index]
    }

    pub fn energy(&self) -> T {
        energy(&self.taps)
    }

    /// Multiplies every tap by `gain`, keeping the direct index.
    pub fn scaled(&self, gain: T) -> Self {
        Self {
            taps: self.taps.iter().map(|&x| x * gain).collect(),
            sample_rate: self.sample_rate,
            direct_index: self.direct_index,
        }
    }

    /// Truncates or zero-pads to `len` taps. The direct index is kept if it
    /// survives truncation, otherwise recomputed.
    pub fn resized(&self, len: usize) -> Result<Self> {
        let mut taps = self.taps.clone();
        taps.resize(len, T::zero());
        if self.direct_index < len {
            Self::with_direct_index(taps, self.sample_rate, self.direct_index)
        } else {
            Self::new(taps, self.sample_rate)
        }
    }

    pub fn as_signal(&self) -> Signal<T> {
        Signal {
            samples: self.taps.clone(),
            sample_rate: self.sample_rate,
        }
    }
}

/// Index of the first tap with the largest magnitude.
pub fn argmax_abs<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    let mut best_mag = T::neg_infinity();
    for (i, &v) in values.iter().enumerate() {
        if v.abs() > best_mag {
            best = i;
            best_mag = v.abs();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_index_is_argmax() {
        let h = ImpulseResponse::new(vec![0.1, -0.9, 0.5, 0.9], 16000).unwrap();
        assert_eq!(h.direct_index(), 1);
        assert_eq!(h.direct_amplitude(), -0.9);
    }

    #[test]
    fn rejects_bad_taps() {
        assert!(ImpulseResponse::<f64>::new(vec![], 8000).is_err());
        assert_eq!(
            ImpulseResponse::new(vec![1.0, f64::NAN], 8000),
            Err(Error::NonFinite(1))
        );
        assert!(ImpulseResponse::with_direct_index(vec![1.0f64], 8000, 1).is_err());
        assert!(Signal::new(vec![0.0, f64::INFINITY], 8000).is_err());
    }

    #[test]
    fn resize_keeps_direct_index() {
        let h = ImpulseResponse::with_direct_index(vec![0.0, 1.0, 0.2], 8000, 1).unwrap();
        let longer = h.resized(6).unwrap();
        assert_eq!(longer.len(), 6);
        assert_eq!(longer.direct_index(), 1);
    }
}
