//! Material-coating toolkit: a deterministic CPU renderer with intrinsic
//! channel output and a physically-motivated coating thickness model,
//! classic luminance-based compositing baselines, synthetic dataset
//! generation, per-channel PSNR evaluation, and a small conditional
//! rectified-flow trainer.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); concrete
//! aliases for the common instantiations live at the crate root. The
//! rendering and dataset pipeline defaults to `f32` (channel files are
//! 32-bit floats on disk), while the flow trainer and its gradient check
//! run at `f64`.

pub mod baselines;
pub mod coating;
pub mod color;
pub mod dataset;
pub mod eval;
pub mod mesh;
pub mod noise;
pub mod num;
pub mod raster;
pub mod render;
pub mod rng;
pub mod toyflow;
pub mod vec3;

pub use coating::{CoatAlbedo, CoatingSpec, TraitVector};
pub use num::Real;
pub use raster::{ColorImage, NormalMap, ScalarMap};
pub use rng::Rng;
pub use vec3::Vec3;

/// Single-precision aliases: the rendering/dataset pipeline default.
pub type Vec3f = vec3::Vec3<f32>;
pub type ColorImage32 = raster::ColorImage<f32>;
pub type ScalarMap32 = raster::ScalarMap<f32>;
pub type TraitVector32 = coating::TraitVector<f32>;
pub type CoatingSpec32 = coating::CoatingSpec<f32>;
pub type Mesh32 = mesh::TriangleMesh<f32>;
pub type Scene32 = render::SceneSpec<f32>;
pub type ChannelStack32 = render::ChannelStack<f32>;

/// Double-precision aliases: used by the flow trainer and gradient checks.
pub type Vec3d = vec3::Vec3<f64>;
pub type ColorImage64 = raster::ColorImage<f64>;
pub type ScalarMap64 = raster::ScalarMap<f64>;
pub type TraitVector64 = coating::TraitVector<f64>;
pub type Mesh64 = mesh::TriangleMesh<f64>;
pub type FlowModel64 = toyflow::FlowModel<f64>;
