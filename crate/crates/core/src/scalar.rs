//! Scalar abstraction for the numerical parts of the crate.
//!
//! Every quantum type is generic over a real field `R` (`f32` or `f64`); amplitudes
//! are `Complex<R>`. Tolerances and configuration stay in `f64` and are converted
//! at the boundary.

use nalgebra::RealField;
use num_complex::Complex;

/// Real scalar usable by the quantum grid and the solver.
pub trait Real: RealField + Copy {}

impl<T> Real for T where T: RealField + Copy {}

pub type C<R> = Complex<R>;

#[inline]
pub fn from_f64<R: Real>(x: f64) -> R {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<R: Real>(x: R) -> f64 {
    // f32 and f64 both embed in f64
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn c<R: Real>(re: R, im: R) -> C<R> {
    Complex::new(re, im)
}
