//! Coating description: the four scalar traits, an albedo source, and a mask.

use crate::num::Real;
use crate::raster::{ColorImage, ScalarMap};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CoatingError {
    #[error("trait `{name}` = {value} outside [0, 1]")]
    TraitOutOfRange { name: &'static str, value: f64 },
    #[error("uniform albedo component {value} outside [0, 1]")]
    AlbedoOutOfRange { value: f64 },
    #[error("albedo texture value {value} outside [0, 1]")]
    TextureOutOfRange { value: f64 },
}

/// The four scalar coating controls, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraitVector<T> {
    pub roughness: T,
    pub metalness: T,
    pub transmission: T,
    pub thickness: T,
}

impl<T: Real> TraitVector<T> {
    pub fn new(
        roughness: T,
        metalness: T,
        transmission: T,
        thickness: T,
    ) -> Result<Self, CoatingError> {
        for (name, v) in [
            ("roughness", roughness),
            ("metalness", metalness),
            ("transmission", transmission),
            ("thickness", thickness),
        ] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(CoatingError::TraitOutOfRange {
                    name,
                    value: v.as_f64(),
                });
            }
        }
        Ok(TraitVector {
            roughness,
            metalness,
            transmission,
            thickness,
        })
    }

    pub fn cast<U: Real>(&self) -> TraitVector<U> {
        TraitVector {
            roughness: U::of(self.roughness.as_f64()),
            metalness: U::of(self.metalness.as_f64()),
            transmission: U::of(self.transmission.as_f64()),
            thickness: U::of(self.thickness.as_f64()),
        }
    }
}

/// Albedo source for a coating: one color, or a screen-aligned texture.
#[derive(Clone, Debug, PartialEq)]
pub enum CoatAlbedo<T> {
    Uniform(Vec3<T>),
    Texture(ColorImage<T>),
}

impl<T: Real> CoatAlbedo<T> {
    pub fn validate(&self) -> Result<(), CoatingError> {
        match self {
            CoatAlbedo::Uniform(c) => {
                for v in c.0 {
                    if !(v >= T::zero() && v <= T::one()) {
                        return Err(CoatingError::AlbedoOutOfRange { value: v.as_f64() });
                    }
                }
            }
            CoatAlbedo::Texture(img) => {
                for v in img.data() {
                    if !(*v >= T::zero() && *v <= T::one()) {
                        return Err(CoatingError::TextureOutOfRange { value: v.as_f64() });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_texture(&self) -> bool {
        matches!(self, CoatAlbedo::Texture(_))
    }
}

/// A full coating: traits, albedo source, and the coat mask. The mask must
/// match the render target dimensions; `render_coated` checks this.
#[derive(Clone, Debug)]
pub struct CoatingSpec<T> {
    pub traits: TraitVector<T>,
    pub albedo: CoatAlbedo<T>,
    pub mask: ScalarMap<T>,
}

impl<T: Real> CoatingSpec<T> {
    pub fn new(
        traits: TraitVector<T>,
        albedo: CoatAlbedo<T>,
        mask: ScalarMap<T>,
    ) -> Result<Self, CoatingError> {
        albedo.validate()?;
        Ok(CoatingSpec {
            traits,
            albedo,
            mask,
        })
    }
}
