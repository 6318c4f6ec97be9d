//! Coat mask generation and screen-space albedo projection.

use super::{ChannelStack, RenderError};
use crate::coating::{CoatAlbedo, CoatingSpec};
use crate::noise::value_noise_2d;
use crate::num::Real;
use crate::raster::{ColorImage, ScalarMap};
use crate::rng::Rng;

const MASK_NOISE_CELLS: f64 = 5.0;

/// Binary coat mask: a thresholded value-noise field intersected with the
/// object silhouette. The threshold is found by bisection so the masked
/// fraction of object pixels lands within +-10% of `coverage_target`;
/// `coverage_target = 1` returns the full silhouette.
pub fn generate_mask<T: Real>(
    stack: &ChannelStack<T>,
    rng: &mut Rng,
    coverage_target: T,
) -> Result<ScalarMap<T>, RenderError> {
    let salt = rng.next_u64();
    generate_mask_with_salt(stack, salt, coverage_target)
}

/// Deterministic variant keyed by an explicit noise salt.
pub fn generate_mask_with_salt<T: Real>(
    stack: &ChannelStack<T>,
    salt: u64,
    coverage_target: T,
) -> Result<ScalarMap<T>, RenderError> {
    let coverage = coverage_target.as_f64();
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(RenderError::BadCoverage(coverage));
    }
    let (w, h) = (stack.object_mask.width(), stack.object_mask.height());
    let object: Vec<usize> = (0..w * h)
        .filter(|i| stack.object_mask.data()[*i] > T::zero())
        .collect();
    if object.is_empty() {
        return Err(RenderError::EmptySilhouette);
    }
    if coverage == 1.0 {
        return Ok(stack.object_mask.clone());
    }

    let side = w.max(h) as f64;
    let noise: Vec<f64> = object
        .iter()
        .map(|i| {
            let x = (i % w) as f64;
            let y = (i / w) as f64;
            value_noise_2d(
                x / side * MASK_NOISE_CELLS,
                y / side * MASK_NOISE_CELLS,
                salt,
            )
        })
        .collect();

    // frac(threshold) is non-increasing, so bisect.
    let frac_at = |tau: f64| noise.iter().filter(|n| **n >= tau).count() as f64 / noise.len() as f64;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut tau = 0.5;
    for _ in 0..64 {
        tau = 0.5 * (lo + hi);
        let f = frac_at(tau);
        if (f - coverage).abs() <= 0.1 * coverage {
            break;
        }
        if f > coverage {
            lo = tau;
        } else {
            hi = tau;
        }
    }

    let mut mask = ScalarMap::new(w, h);
    for (k, &i) in object.iter().enumerate() {
        if noise[k] >= tau {
            mask.data_mut()[i] = T::one();
        }
    }
    Ok(mask)
}

/// Screen-space projection of the coat albedo over the mask: texture
/// albedos are bilinearly sampled at the pixel's normalized coordinates,
/// uniform albedos fill the mask with the color; everything off-mask is
/// black.
pub fn project_albedo_sized<T: Real>(albedo: &CoatAlbedo<T>, mask: &ScalarMap<T>) -> ColorImage<T> {
    let (w, h) = (mask.width(), mask.height());
    let mut out = ColorImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) > T::zero() {
                let c = match albedo {
                    CoatAlbedo::Uniform(c) => *c,
                    CoatAlbedo::Texture(tex) => {
                        let u = (x as f64 + 0.5) / w as f64;
                        let v = (y as f64 + 0.5) / h as f64;
                        let tx = T::of(u * tex.width() as f64 - 0.5);
                        let ty = T::of(v * tex.height() as f64 - 0.5);
                        tex.sample_bilinear(tx, ty)
                    }
                };
                out.set(x, y, c);
            }
        }
    }
    out
}

pub fn project_albedo<T: Real>(
    coat: &CoatingSpec<T>,
    stack: &ChannelStack<T>,
) -> Result<ColorImage<T>, RenderError> {
    if coat.mask.width() != stack.width() || coat.mask.height() != stack.height() {
        return Err(RenderError::MaskSizeMismatch {
            want_w: stack.width(),
            want_h: stack.height(),
            got_w: coat.mask.width(),
            got_h: coat.mask.height(),
        });
    }
    Ok(project_albedo_sized(&coat.albedo, &coat.mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Vec3;

    #[test]
    fn uniform_projection_fills_mask_only() {
        let mask = ScalarMap::mask_from_data(2, 2, vec![1.0f64, 0.0, 0.0, 1.0]).unwrap();
        let out = project_albedo_sized(&CoatAlbedo::Uniform(Vec3::new(1.0, 0.0, 0.0)), &mask);
        assert_eq!(out.get(0, 0), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(out.get(1, 0), Vec3::zero());
        assert_eq!(out.get(0, 1), Vec3::zero());
        assert_eq!(out.get(1, 1), Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn empty_mask_projects_black() {
        let mask = ScalarMap::new(4, 4);
        let out = project_albedo_sized(&CoatAlbedo::Uniform(Vec3::<f32>::splat(0.7)), &mask);
        assert!(out.pixels().all(|p| p == Vec3::zero()));
    }

    #[test]
    fn texture_projection_hits_texel_centers_when_sizes_match() {
        // Checkerboard texture the same size as the target: pixel centers
        // map exactly onto texel centers.
        let tex = ColorImage::<f64>::checker(8, 8, 4, Vec3::splat(1.0), Vec3::zero());
        let mask = ScalarMap::mask_from_data(8, 8, vec![1.0; 64]).unwrap();
        let out = project_albedo_sized(&CoatAlbedo::Texture(tex.clone()), &mask);
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(out.get(x, y), tex.get(x, y));
            }
        }
    }
}
