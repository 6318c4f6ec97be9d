//! Euler sampling of the learned velocity field, from pure noise at t = 0
//! to the image at t = 1.

use super::model::Velocity;
use super::packing::{unpack, TokenSequence, Tokens};
use super::train::gaussian_tokens;
use super::FlowError;
use crate::num::Real;
use crate::raster::ColorImage;
use crate::rng::Rng;

/// Integrate `z' = v(z, t)` with `steps` Euler steps of size `1/steps`.
pub fn sample_tokens<T: Real, V: Velocity<T>>(
    velocity: &V,
    cond: &TokenSequence<T>,
    trait_tokens: &[Vec<T>],
    steps: usize,
    rng: &mut Rng,
    dim: usize,
) -> Tokens<T> {
    let mut z = gaussian_tokens(cond.tokens.count, dim, rng);
    let dt = T::of(1.0 / steps.max(1) as f64);
    for k in 0..steps.max(1) {
        let t = T::of(k as f64 / steps.max(1) as f64);
        let v = velocity.velocity(&z, t, cond, trait_tokens);
        for (zi, vi) in z.data.iter_mut().zip(&v.data) {
            *zi += dt * *vi;
        }
    }
    z
}

/// Sample an RGB image: integrate, unpack the tokens to planes, clamp to
/// [0, 1].
pub fn sample_image<T: Real, V: Velocity<T>>(
    velocity: &V,
    cond: &TokenSequence<T>,
    trait_tokens: &[Vec<T>],
    steps: usize,
    rng: &mut Rng,
    h: usize,
    w: usize,
    p: usize,
) -> Result<ColorImage<T>, FlowError> {
    let z = sample_tokens(velocity, cond, trait_tokens, steps, rng, 3 * p * p);
    let planes = unpack(&z, 3, h, w, p)?;
    let clamped: [Vec<T>; 3] = [
        planes[0].iter().map(|v| v.max(T::zero()).min(T::one())).collect(),
        planes[1].iter().map(|v| v.max(T::zero()).min(T::one())).collect(),
        planes[2].iter().map(|v| v.max(T::zero()).min(T::one())).collect(),
    ];
    ColorImage::from_planes(w, h, &clamped)
        .map_err(|e| FlowError::ShapeMismatch(format!("unpacked image: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toyflow::model::{flow_target, Velocity};
    use crate::toyflow::packing::TokenLayout;

    struct ConstantVelocity {
        value: f64,
        dim: usize,
    }

    impl Velocity<f64> for ConstantVelocity {
        fn velocity(
            &self,
            z: &Tokens<f64>,
            _t: f64,
            _cond: &TokenSequence<f64>,
            _traits: &[Vec<f64>],
        ) -> Tokens<f64> {
            Tokens {
                data: vec![self.value; z.count * self.dim],
                count: z.count,
                dim: self.dim,
            }
        }
    }

    fn empty_cond(n: usize) -> TokenSequence<f64> {
        TokenSequence {
            tokens: Tokens::zeros(n, 1),
            layout: TokenLayout {
                image_dim: 1,
                albedo_dim: 0,
                mask_dim: 0,
            },
        }
    }

    #[test]
    fn single_step_with_constant_velocity_adds_the_constant() {
        let cond = empty_cond(3);
        let vel = ConstantVelocity { value: 2.5, dim: 4 };
        let mut rng_a = Rng::new(9);
        let z = sample_tokens(&vel, &cond, &[], 1, &mut rng_a, 4);
        let mut rng_b = Rng::new(9);
        let noise = gaussian_tokens::<f64>(3, 4, &mut rng_b);
        for (a, b) in z.data.iter().zip(&noise.data) {
            assert!((a - (b + 2.5)).abs() < 1e-12);
        }
    }

    struct TargetVelocity {
        target: Tokens<f64>,
    }

    impl Velocity<f64> for TargetVelocity {
        fn velocity(
            &self,
            _z: &Tokens<f64>,
            _t: f64,
            _cond: &TokenSequence<f64>,
            _traits: &[Vec<f64>],
        ) -> Tokens<f64> {
            self.target.clone()
        }
    }

    #[test]
    fn oracle_velocity_recovers_x0_in_one_step() {
        // v = x0 - noise with the matching noise inverts the interpolant.
        let mut rng = Rng::new(11);
        let x0 = Tokens {
            data: (0..8).map(|_| rng.next_f64()).collect(),
            count: 2,
            dim: 4,
        };
        let mut noise_rng = Rng::new(77);
        let noise = gaussian_tokens::<f64>(2, 4, &mut noise_rng);
        let vel = TargetVelocity {
            target: flow_target(&x0, &noise),
        };
        let mut sample_rng = Rng::new(77);
        let z = sample_tokens(&vel, &empty_cond(2), &[], 1, &mut sample_rng, 4);
        for (a, b) in z.data.iter().zip(&x0.data) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let vel = ConstantVelocity { value: 0.1, dim: 12 };
        let cond = empty_cond(4);
        let a = sample_image(&vel, &cond, &[], 8, &mut Rng::new(5), 4, 4, 2).unwrap();
        let b = sample_image(&vel, &cond, &[], 8, &mut Rng::new(5), 4, 4, 2).unwrap();
        assert_eq!(a, b);
    }
}
