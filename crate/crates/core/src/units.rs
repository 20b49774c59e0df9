//! Frequency-unit conventions.
//!
//! Every rate held by this crate is an ordinary frequency in Hz (the value a
//! paper would quote as ω/2π). Dynamics and efficiency kernels multiply by 2π
//! exactly once, at the point of use, through these helpers.

use std::f64::consts::TAU;

/// Ordinary frequency (Hz) to angular rate (rad/s).
#[inline]
pub fn to_angular(rate_hz: f64) -> f64 {
    TAU * rate_hz
}

/// Angular rate (rad/s) back to ordinary frequency (Hz).
#[inline]
pub fn from_angular(rate_rad: f64) -> f64 {
    rate_rad / TAU
}
