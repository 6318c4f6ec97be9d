//! GGX microfacet specular lobe with Smith shadowing-masking and
//! Fresnel-Schlick, in the metalness workflow.

use crate::num::Real;
use crate::vec3::Vec3;

/// Perceptual roughness -> distribution width. The common squaring remap.
#[inline]
pub fn roughness_to_alpha<T: Real>(roughness: T) -> T {
    // Floor keeps the lobe finite for mirror-smooth materials.
    (roughness * roughness).max(T::of(1e-3))
}

/// GGX normal distribution. At `ndh = 1` this equals `1 / (pi alpha^2)`.
#[inline]
pub fn ggx_d<T: Real>(ndh: T, alpha: T) -> T {
    if ndh <= T::zero() {
        return T::zero();
    }
    let a2 = alpha * alpha;
    let d = ndh * ndh * (a2 - T::one()) + T::one();
    a2 / (T::PI() * d * d)
}

/// Smith monodirectional shadowing for GGX.
#[inline]
pub fn smith_g1<T: Real>(ndx: T, alpha: T) -> T {
    if ndx <= T::zero() {
        return T::zero();
    }
    let a2 = alpha * alpha;
    T::of(2.0) * ndx / (ndx + (a2 + (T::one() - a2) * ndx * ndx).sqrt())
}

#[inline]
pub fn fresnel_schlick<T: Real>(vdh: T, f0: Vec3<T>) -> Vec3<T> {
    let f = (T::one() - vdh).max(T::zero()).powi(5);
    f0 + (Vec3::splat(T::one()) - f0) * f
}

/// Specular reflectance at normal incidence: 0.04 for dielectrics, the
/// albedo for metals.
#[inline]
pub fn f0_from<T: Real>(albedo: Vec3<T>, metalness: T) -> Vec3<T> {
    Vec3::lerp(Vec3::splat(T::of(0.04)), albedo, metalness)
}

/// Cook-Torrance specular BRDF value `D G F / (4 (n.l)(n.v))`.
/// Returns zero when the light or view is below the surface.
pub fn specular_brdf<T: Real>(
    n: Vec3<T>,
    v: Vec3<T>,
    l: Vec3<T>,
    roughness: T,
    f0: Vec3<T>,
) -> Vec3<T> {
    let ndl = n.dot(l);
    let ndv = n.dot(v);
    if ndl <= T::zero() || ndv <= T::zero() {
        return Vec3::zero();
    }
    let h = match (v + l).try_normalized() {
        Some(h) => h,
        None => return Vec3::zero(),
    };
    let alpha = roughness_to_alpha(roughness);
    let d = ggx_d(n.dot(h), alpha);
    let g = smith_g1(ndv, alpha) * smith_g1(ndl, alpha);
    let f = fresnel_schlick(v.dot(h).max(T::zero()), f0);
    f * (d * g / (T::of(4.0) * ndl * ndv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_at_normal_incidence_is_closed_form() {
        for alpha in [0.05f64, 0.2, 0.5, 0.81, 1.0] {
            let d = ggx_d(1.0, alpha);
            let expect = 1.0 / (std::f64::consts::PI * alpha * alpha);
            assert!(
                ((d - expect) / expect).abs() < 1e-6,
                "alpha {alpha}: {d} vs {expect}"
            );
        }
    }

    #[test]
    fn distribution_integrates_to_one_over_projected_hemisphere() {
        // Quadrature of D(ndh) ndh over the hemisphere; coarse grid, loose
        // tolerance.
        let alpha = 0.5f64;
        let n_theta = 2000;
        let mut total = 0.0;
        for i in 0..n_theta {
            let theta = (i as f64 + 0.5) / n_theta as f64 * std::f64::consts::FRAC_PI_2;
            let d_theta = std::f64::consts::FRAC_PI_2 / n_theta as f64;
            total += ggx_d(theta.cos(), alpha)
                * theta.cos()
                * theta.sin()
                * d_theta
                * std::f64::consts::TAU;
        }
        assert!((total - 1.0).abs() < 0.02, "integral {total}");
    }

    #[test]
    fn smith_g1_is_one_at_normal_incidence() {
        assert!((smith_g1(1.0f64, 0.7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fresnel_endpoints() {
        let f0 = Vec3::<f64>::splat(0.04);
        assert_eq!(fresnel_schlick(1.0, f0), f0);
        let grazing = fresnel_schlick(0.0, f0);
        assert!((grazing.x() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn specular_is_zero_below_horizon() {
        let n = Vec3::<f64>::new(0.0, 1.0, 0.0);
        let v = Vec3::new(0.0, 1.0, 0.0);
        let l = Vec3::new(0.0, -1.0, 0.0);
        assert_eq!(specular_brdf(n, v, l, 0.5, Vec3::splat(0.04)), Vec3::zero());
    }
}
