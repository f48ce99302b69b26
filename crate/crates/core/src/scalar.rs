//! Scalar abstraction shared by every module.
//!
//! All numerics are written against [`Real`], which is implemented for `f32`
//! and `f64`. Complex values use [`num_complex::Complex`] over the same type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Default + Display + Debug
{
    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("integer representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sin(pi x) / (pi x)` with the removable singularity at zero set to one.
pub fn sinc<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::one()
    } else {
        let px = T::PI() * x;
        px.sin() / px
    }
}

/// Sum of squares.
pub fn energy<T: Real>(samples: &[T]) -> T {
    samples.iter().map(|&x| x * x).sum()
}

/// Largest absolute value, zero for an empty slice.
pub fn max_abs<T: Real>(samples: &[T]) -> T {
    samples.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub(crate) fn cmax_abs<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

/// Full linear convolution of two sequences.
pub fn convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == T::zero() {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o = *o + x * y;
        }
    }
    out
}
