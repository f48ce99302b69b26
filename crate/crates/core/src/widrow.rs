//! Time-domain least-squares inverse filter: choose `g` so that `h * g` is as
//! close as possible to a delayed unit impulse.

use crate::error::{Error, Result};
use crate::lsq::{lsqr, solve_least_squares, Matrix};
use crate::scalar::{convolve, Real};
use crate::signal::{ImpulseResponse, Signal};

/// Convolution matrices larger than this many entries are never formed.
pub const DENSE_LIMIT: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseFilterSpec {
    /// Taps of `g`.
    pub filter_len: usize,
    /// Position of the one in the target vector.
    pub target_delay: usize,
    /// Taps of `h` used; the channel is truncated or zero-padded to this.
    pub channel_len: usize,
    /// Entry count above which the solve switches to matrix-free LSQR.
    pub dense_limit: usize,
}

impl InverseFilterSpec {
    /// Default modelling delay `n_d + filter_len / 2`.
    pub fn for_channel<T: Real>(h: &ImpulseResponse<T>, filter_len: usize, channel_len: usize) -> Self {
        Self {
            filter_len,
            target_delay: h.direct_index() + filter_len / 2,
            channel_len,
            dense_limit: DENSE_LIMIT,
        }
    }

    /// Rows of the convolution matrix, `channel_len + filter_len - 1`.
    pub fn output_len(&self) -> usize {
        self.channel_len + self.filter_len - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.filter_len < 1 || self.channel_len < 1 {
            return Err(Error::InvalidInverseFilter(
                "filter and channel lengths must be at least 1".into(),
            ));
        }
        if self.target_delay >= self.output_len() {
            return Err(Error::InvalidInverseFilter(format!(
                "target delay {} outside 0..{}",
                self.target_delay,
                self.output_len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct InverseFilter<T: Real> {
    pub filter: ImpulseResponse<T>,
    /// `||h * g - e_d||^2`.
    pub residual: T,
}

/// Least-squares inverse of `h` for the given target delay.
pub fn widrow_inverse<T: Real>(
    h: &ImpulseResponse<T>,
    spec: &InverseFilterSpec,
) -> Result<InverseFilter<T>> {
    spec.validate()?;
    let mut taps = h.taps().to_vec();
    taps.resize(spec.channel_len, T::zero());
    if taps.iter().all(|&x| x == T::zero()) {
        return Err(Error::InvalidImpulseResponse(
            "cannot invert an all-zero channel".into(),
        ));
    }
    let rows = spec.output_len();
    let cols = spec.filter_len;
    let mut target = vec![T::zero(); rows];
    target[spec.target_delay] = T::one();

    let g = if rows.saturating_mul(cols) <= spec.dense_limit {
        let mut a = Matrix::zeros(rows, cols);
        for j in 0..cols {
            a.column_mut(j)[j..j + taps.len()].copy_from_slice(&taps);
        }
        solve_least_squares(a, &target).x
    } else {
        let forward = |g: &[T]| convolve(&taps, g);
        let adjoint = |y: &[T]| {
            (0..cols)
                .map(|j| {
                    taps.iter()
                        .zip(&y[j..])
                        .fold(T::zero(), |acc, (&hv, &yv)| acc + hv * yv)
                })
                .collect::<Vec<T>>()
        };
        lsqr(forward, adjoint, cols, &target, T::epsilon() * T::lit(10.0), 20 * cols)
    };

    let composite = convolve(&taps, &g);
    let residual = composite
        .iter()
        .zip(&target)
        .map(|(&c, &t)| (c - t) * (c - t))
        .sum();
    Ok(InverseFilter {
        filter: ImpulseResponse::new(g, h.sample_rate())?,
        residual,
    })
}

/// Full convolution `y * g`.
pub fn equalize<T: Real>(y: &Signal<T>, g: &ImpulseResponse<T>) -> Result<Signal<T>> {
    if y.is_empty() {
        return Err(Error::EmptySignal);
    }
    Signal::new(convolve(y.samples(), g.taps()), y.sample_rate())
}
