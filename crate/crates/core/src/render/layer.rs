//! The coating layer model: thickness-driven transmissivity, normal
//! smoothing, and masked compositing.

use super::RenderError;
use crate::num::Real;
use crate::vec3::Vec3;

/// Thicker coats transmit less: `transmission * (1 - thickness)`.
/// Both inputs in [0, 1]; the result stays in [0, 1].
#[inline]
pub fn effective_transmission<T: Real>(transmission: T, thickness: T) -> T {
    transmission * (T::one() - thickness)
}

/// Thickness fills micro-crevasses: blend the detailed shading normal
/// toward the smooth geometric normal and renormalize.
pub fn shading_normal<T: Real>(
    n_detail: Vec3<T>,
    n_smooth: Vec3<T>,
    thickness: T,
) -> Result<Vec3<T>, RenderError> {
    let blended = n_detail * (T::one() - thickness) + n_smooth * thickness;
    blended
        .try_normalized()
        .ok_or(RenderError::DegenerateNormal)
}

/// Masked two-layer blend:
/// `base + mask * ((1 - t_eff) * coat + t_eff * base - base)`, i.e.
/// `lerp(base, lerp(coat, base, t_eff), mask)` arranged so that `mask = 0`
/// and `t_eff = 1` return the base bit-exactly.
#[inline]
pub fn layer_composite<T: Real>(base: Vec3<T>, coat: Vec3<T>, t_eff: T, mask: T) -> Vec3<T> {
    let inner = coat * (T::one() - t_eff) + base * t_eff;
    base + (inner - base) * mask
}
