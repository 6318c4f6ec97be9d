//! Color utilities: luminance, smoothstep, and the sRGB transfer function.
//!
//! All image math in this crate happens in linear space; the sRGB transfer
//! function is applied only at the 8-bit file boundary.

use crate::num::Real;
use crate::vec3::Vec3;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ColorError {
    #[error("invalid smoothstep thresholds: lower bound {lo} must be < upper bound {hi}")]
    InvalidThreshold { lo: f64, hi: f64 },
}

/// Rec. 601 / Photoshop luminance weights: `0.30 R + 0.59 G + 0.11 B`.
#[inline]
pub fn luminance<T: Real>(c: Vec3<T>) -> T {
    T::of(0.30) * c.x() + T::of(0.59) * c.y() + T::of(0.11) * c.z()
}

/// Hermite step: 0 below `a`, 1 above `b`, smooth in between.
/// Requires `a < b`.
pub fn smoothstep<T: Real>(a: T, b: T, x: T) -> Result<T, ColorError> {
    if !(a < b) {
        return Err(ColorError::InvalidThreshold {
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    Ok(smoothstep_unchecked(a, b, x))
}

/// `smoothstep` without the threshold check, for callers that validated once.
#[inline]
pub fn smoothstep_unchecked<T: Real>(a: T, b: T, x: T) -> T {
    let t = ((x - a) / (b - a)).max(T::zero()).min(T::one());
    t * t * (T::of(3.0) - T::of(2.0) * t)
}

#[inline]
pub fn lerp<T: Real>(a: T, b: T, t: T) -> T {
    a + (b - a) * t
}

/// Linear radiance -> sRGB-encoded value, both in [0, 1].
pub fn linear_to_srgb<T: Real>(v: T) -> T {
    let v = v.max(T::zero()).min(T::one());
    if v <= T::of(0.003_130_8) {
        v * T::of(12.92)
    } else {
        T::of(1.055) * v.powf(T::of(1.0 / 2.4)) - T::of(0.055)
    }
}

/// sRGB-encoded value -> linear radiance, both in [0, 1].
pub fn srgb_to_linear<T: Real>(v: T) -> T {
    if v <= T::of(0.040_45) {
        v / T::of(12.92)
    } else {
        ((v + T::of(0.055)) / T::of(1.055)).powf(T::of(2.4))
    }
}

pub fn linear_to_srgb8<T: Real>(v: T) -> u8 {
    (linear_to_srgb(v).as_f64() * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn srgb8_to_linear<T: Real>(v: u8) -> T {
    srgb_to_linear(T::of(v as f64 / 255.0))
}
