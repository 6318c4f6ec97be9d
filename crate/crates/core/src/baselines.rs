//! Classical compositing baselines: the luminance-windowed "blend if"
//! operator and the non-separable color blend mode.

use crate::color::{luminance, smoothstep_unchecked, ColorError};
use crate::num::Real;
use crate::raster::{ColorImage, ScalarMap};
use crate::vec3::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("images are {a_w}x{a_h} vs {b_w}x{b_h}")]
    DimensionMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error("blend-if thresholds must satisfy lo0 < lo1 <= hi0 < hi1 in [0,1], got {0:?}")]
    BadThresholds([f64; 4]),
}

/// Split-slider thresholds `(lo0, lo1, hi0, hi1)`: the coat fades in over
/// `[lo0, lo1]` and back out over `[hi0, hi1]` of the base luminance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlendIfThresholds<T> {
    pub lo0: T,
    pub lo1: T,
    pub hi0: T,
    pub hi1: T,
}

impl<T: Real> Default for BlendIfThresholds<T> {
    fn default() -> Self {
        BlendIfThresholds {
            lo0: T::zero(),
            lo1: T::of(0.25),
            hi0: T::of(0.75),
            hi1: T::one(),
        }
    }
}

impl<T: Real> BlendIfThresholds<T> {
    pub fn new(lo0: T, lo1: T, hi0: T, hi1: T) -> Result<Self, BaselineError> {
        let t = BlendIfThresholds { lo0, lo1, hi0, hi1 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), BaselineError> {
        let vals = [self.lo0, self.lo1, self.hi0, self.hi1];
        let in_range = vals.iter().all(|v| *v >= T::zero() && *v <= T::one());
        if !in_range || !(self.lo0 < self.lo1 && self.lo1 <= self.hi0 && self.hi0 < self.hi1) {
            return Err(BaselineError::BadThresholds(vals.map(|v| v.as_f64())));
        }
        Ok(())
    }
}

fn check_dims<T: Real>(
    base: &ColorImage<T>,
    coat: &ColorImage<T>,
    mask: &ScalarMap<T>,
) -> Result<(), BaselineError> {
    if base.width() != coat.width() || base.height() != coat.height() {
        return Err(BaselineError::DimensionMismatch {
            a_w: base.width(),
            a_h: base.height(),
            b_w: coat.width(),
            b_h: coat.height(),
        });
    }
    if base.width() != mask.width() || base.height() != mask.height() {
        return Err(BaselineError::DimensionMismatch {
            a_w: base.width(),
            a_h: base.height(),
            b_w: mask.width(),
            b_h: mask.height(),
        });
    }
    Ok(())
}

/// Luminance-windowed blend: the coat layer is suppressed in the darkest
/// shadows and brightest highlights of the base and appears fully in the
/// mid-tones. Per pixel:
/// `w = smoothstep(lo0, lo1, L) * (1 - smoothstep(hi0, hi1, L))`,
/// `out = base + mask * w * (coat - base)`.
pub fn blend_if<T: Real>(
    base: &ColorImage<T>,
    coat_layer: &ColorImage<T>,
    mask: &ScalarMap<T>,
    thresholds: BlendIfThresholds<T>,
) -> Result<ColorImage<T>, BaselineError> {
    check_dims(base, coat_layer, mask)?;
    thresholds.validate()?;
    let (w, h) = (base.width(), base.height());
    let mut out = ColorImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let b = base.get(x, y);
            let lum = luminance(b);
            let rise = smoothstep_unchecked(thresholds.lo0, thresholds.lo1, lum);
            let fall = T::one() - smoothstep_unchecked(thresholds.hi0, thresholds.hi1, lum);
            let weight = rise * fall * mask.get(x, y);
            let c = coat_layer.get(x, y);
            out.set(x, y, b + (c - b) * weight);
        }
    }
    Ok(out)
}

/// Add `delta` to every component so the color reaches luminance `target`.
fn set_lum<T: Real>(c: Vec3<T>, target: T) -> Vec3<T> {
    let d = target - luminance(c);
    c + Vec3::splat(d)
}

/// Project an out-of-gamut color back toward its luminance axis, keeping
/// the luminance unchanged. Both scalings pivot on the input's luminance,
/// minimum, and maximum.
fn clip_color<T: Real>(c: Vec3<T>) -> Vec3<T> {
    let l = luminance(c);
    let n = c.min_component();
    let x = c.max_component();
    let mut c = c;
    if n < T::zero() {
        c = Vec3::splat(l) + (c - Vec3::splat(l)) * (l / (l - n));
    }
    if x > T::one() && x > l {
        c = Vec3::splat(l) + (c - Vec3::splat(l)) * ((T::one() - l) / (x - l));
    }
    c
}

/// Non-separable color blend: transfers the coat's hue and saturation while
/// preserving the base's luminance. Identity wherever the mask is zero.
pub fn color_blend<T: Real>(
    base: &ColorImage<T>,
    coat_layer: &ColorImage<T>,
    mask: &ScalarMap<T>,
) -> Result<ColorImage<T>, BaselineError> {
    check_dims(base, coat_layer, mask)?;
    let (w, h) = (base.width(), base.height());
    let mut out = ColorImage::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let b = base.get(x, y);
            let result = if mask.get(x, y) > T::zero() {
                clip_color(set_lum(coat_layer.get(x, y), luminance(b)))
            } else {
                b
            };
            out.set(x, y, result);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_image(rng: &mut Rng, w: usize, h: usize) -> ColorImage<f64> {
        let data = (0..w * h * 3).map(|_| rng.next_f64()).collect();
        ColorImage::from_data(w, h, data).unwrap()
    }

    fn ones_mask(w: usize, h: usize) -> ScalarMap<f64> {
        ScalarMap::mask_from_data(w, h, vec![1.0; w * h]).unwrap()
    }

    #[test]
    fn blend_if_suppresses_coat_in_darks() {
        let base = ColorImage::splat(2, 2, Vec3::zero());
        let coat = ColorImage::splat(2, 2, Vec3::splat(1.0));
        let out = blend_if(&base, &coat, &ones_mask(2, 2), BlendIfThresholds::default()).unwrap();
        assert_eq!(out, base);
    }

    #[test]
    fn blend_if_applies_coat_fully_in_midtones() {
        // L = 0.5: smoothstep(0, 0.25, 0.5) = 1 and 1 - smoothstep(0.75, 1, 0.5) = 1.
        let base = ColorImage::splat(2, 2, Vec3::splat(0.5));
        let coat = ColorImage::splat(2, 2, Vec3::new(0.9, 0.1, 0.2));
        let out = blend_if(&base, &coat, &ones_mask(2, 2), BlendIfThresholds::default()).unwrap();
        for p in out.pixels() {
            assert!((p - Vec3::new(0.9, 0.1, 0.2)).length() < 1e-12);
        }
    }

    #[test]
    fn blend_if_is_identity_off_mask() {
        let mut rng = Rng::new(10);
        let base = random_image(&mut rng, 8, 8);
        let coat = random_image(&mut rng, 8, 8);
        let mask = ScalarMap::new(8, 8);
        let out = blend_if(&base, &coat, &mask, BlendIfThresholds::default()).unwrap();
        assert_eq!(out, base);
    }

    #[test]
    fn blend_if_boundary_suppression_is_bit_exact() {
        let mut rng = Rng::new(11);
        let coat = random_image(&mut rng, 16, 16);
        let mask = ones_mask(16, 16);
        let thresholds = BlendIfThresholds::<f64>::default();
        // Mix of extreme-dark and extreme-bright base pixels.
        let mut base = ColorImage::new(16, 16);
        for y in 0..16 {
            for x in 0..16 {
                base.set(
                    x,
                    y,
                    if (x + y) % 2 == 0 {
                        Vec3::zero()
                    } else {
                        Vec3::splat(1.0)
                    },
                );
            }
        }
        let out = blend_if(&base, &coat, &mask, thresholds).unwrap();
        assert_eq!(out, base);
    }

    #[test]
    fn blend_if_output_is_a_convex_combination() {
        let mut rng = Rng::new(12);
        let base = random_image(&mut rng, 12, 12);
        let coat = random_image(&mut rng, 12, 12);
        let mask_data = (0..144).map(|_| rng.next_f64()).collect();
        let mask = ScalarMap::mask_from_data(12, 12, mask_data).unwrap();
        let out = blend_if(&base, &coat, &mask, BlendIfThresholds::default()).unwrap();
        for y in 0..12 {
            for x in 0..12 {
                let (b, c, o) = (base.get(x, y), coat.get(x, y), out.get(x, y));
                for k in 0..3 {
                    let lo = b.0[k].min(c.0[k]) - 1e-12;
                    let hi = b.0[k].max(c.0[k]) + 1e-12;
                    assert!(o.0[k] >= lo && o.0[k] <= hi);
                }
            }
        }
    }

    #[test]
    fn blend_if_rejects_bad_thresholds() {
        let base = ColorImage::<f64>::new(2, 2);
        let coat = ColorImage::new(2, 2);
        let mask = ones_mask(2, 2);
        let t = BlendIfThresholds {
            lo0: 0.3,
            lo1: 0.2,
            hi0: 0.75,
            hi1: 1.0,
        };
        assert!(blend_if(&base, &coat, &mask, t).is_err());
        assert!(BlendIfThresholds::new(0.0, 0.25, 0.75, 1.5).is_err());
    }

    #[test]
    fn color_blend_of_gray_coat_is_base_luminance() {
        let mut rng = Rng::new(13);
        let base = random_image(&mut rng, 8, 8);
        let coat = ColorImage::splat(8, 8, Vec3::splat(0.42));
        let out = color_blend(&base, &coat, &ones_mask(8, 8)).unwrap();
        for (o, b) in out.pixels().zip(base.pixels()) {
            let l = luminance(b);
            assert!((o - Vec3::splat(l)).length() < 1e-12);
        }
    }

    #[test]
    fn color_blend_red_coat_on_matching_luminance_is_red() {
        // luminance(1, 0, 0) = 0.30 exactly, so a base with that luminance
        // leaves the coat unchanged.
        let base = ColorImage::splat(2, 2, Vec3::new(1.0, 0.0, 0.0));
        let coat = ColorImage::splat(2, 2, Vec3::new(1.0, 0.0, 0.0));
        let out = color_blend(&base, &coat, &ones_mask(2, 2)).unwrap();
        for p in out.pixels() {
            assert!((p - Vec3::new(1.0, 0.0, 0.0)).length() < 1e-12);
        }
    }

    #[test]
    fn color_blend_fixed_point_and_off_mask_identity() {
        let mut rng = Rng::new(14);
        let base = random_image(&mut rng, 8, 8);
        let out = color_blend(&base, &base, &ones_mask(8, 8)).unwrap();
        for (o, b) in out.pixels().zip(base.pixels()) {
            assert!((o - b).length() < 1e-12);
        }
        let off = color_blend(&base, &random_image(&mut rng, 8, 8), &ScalarMap::new(8, 8)).unwrap();
        assert_eq!(off, base);
    }

    #[test]
    fn color_blend_preserves_luminance_under_clipping() {
        let mut rng = Rng::new(15);
        for _ in 0..100 {
            let base = random_image(&mut rng, 4, 4);
            let coat = random_image(&mut rng, 4, 4);
            let out = color_blend(&base, &coat, &ones_mask(4, 4)).unwrap();
            for (o, b) in out.pixels().zip(base.pixels()) {
                assert!((luminance(o) - luminance(b)).abs() < 1e-6);
            }
        }
    }
}
