//! JSON scene description consumed by `coatlab coat`.

use crate::CliError;
use coatlab::mesh;
use coatlab::raster::ColorImage;
use coatlab::render::{
    BaseMaterial, Camera, Floor, Light, MaterialAlbedo, SceneObject, SceneSpec,
};
use coatlab::vec3::Vec3;
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
pub struct SceneFile {
    pub object: ObjectDef,
    pub object_material: MaterialDef,
    #[serde(default)]
    pub floor: Option<FloorDef>,
    pub lights: Vec<LightDef>,
    pub ambient: [f32; 3],
    pub camera: CameraDef,
    #[serde(default)]
    pub detail_amplitude: f32,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectDef {
    Sphere { center: [f32; 3], radius: f32 },
    Cube { center: [f32; 3], half_extent: [f32; 3] },
    Rect {
        center: [f32; 3],
        edge_u: [f32; 3],
        edge_v: [f32; 3],
    },
    Mesh { obj: String },
}

#[derive(Deserialize)]
pub struct MaterialDef {
    pub albedo: AlbedoDef,
    pub roughness: f32,
    #[serde(default)]
    pub metalness: f32,
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum AlbedoDef {
    Uniform([f32; 3]),
    Checker {
        checker: CheckerDef,
    },
    Png {
        png: String,
        #[serde(default = "one")]
        scale: f32,
    },
}

fn one() -> f32 {
    1.0
}

#[derive(Deserialize)]
pub struct CheckerDef {
    pub a: [f32; 3],
    pub b: [f32; 3],
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "one")]
    pub scale: f32,
}

fn default_cells() -> usize {
    8
}

#[derive(Deserialize)]
pub struct FloorDef {
    pub y: f32,
    pub material: MaterialDef,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LightDef {
    Directional {
        direction: [f32; 3],
        intensity: [f32; 3],
    },
    Point {
        position: [f32; 3],
        intensity: [f32; 3],
    },
}

#[derive(Deserialize)]
pub struct CameraDef {
    pub position: [f32; 3],
    pub look_at: [f32; 3],
    pub fov_y_deg: f32,
    pub width: usize,
    pub height: usize,
}

fn build_material(def: &MaterialDef, base: &Path) -> Result<BaseMaterial<f32>, CliError> {
    let albedo = match &def.albedo {
        AlbedoDef::Uniform(c) => MaterialAlbedo::Uniform(Vec3(*c)),
        AlbedoDef::Checker { checker } => MaterialAlbedo::Texture {
            image: ColorImage::checker(64, 64, checker.cells, Vec3(checker.a), Vec3(checker.b)),
            scale: checker.scale,
        },
        AlbedoDef::Png { png, scale } => MaterialAlbedo::Texture {
            image: ColorImage::load_srgb_png(&base.join(png))?,
            scale: *scale,
        },
    };
    Ok(BaseMaterial {
        albedo,
        roughness: def.roughness,
        metalness: def.metalness,
    })
}

/// Parse the scene JSON at `path`; mesh objects are loaded from OBJ files
/// relative to the scene file and get computed normals when the file
/// carries none.
pub fn load_scene(path: &Path) -> Result<SceneSpec<f32>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    let def: SceneFile = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid scene file {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));

    let object = match &def.object {
        ObjectDef::Sphere { center, radius } => SceneObject::Sphere {
            center: Vec3(*center),
            radius: *radius,
        },
        ObjectDef::Cube {
            center,
            half_extent,
        } => SceneObject::Cube {
            center: Vec3(*center),
            half_extent: Vec3(*half_extent),
        },
        ObjectDef::Rect {
            center,
            edge_u,
            edge_v,
        } => SceneObject::Rect {
            center: Vec3(*center),
            edge_u: Vec3(*edge_u),
            edge_v: Vec3(*edge_v),
        },
        ObjectDef::Mesh { obj } => {
            let mesh = mesh::load_obj::<f32>(&base.join(obj))?;
            let mesh = if mesh.normals().is_some() {
                mesh
            } else {
                mesh.compute_vertex_normals()?
            };
            SceneObject::Mesh(mesh)
        }
    };

    let floor = match &def.floor {
        Some(f) => Some(Floor {
            y: f.y,
            material: build_material(&f.material, base)?,
        }),
        None => None,
    };

    Ok(SceneSpec {
        object,
        object_material: build_material(&def.object_material, base)?,
        floor,
        lights: def
            .lights
            .iter()
            .map(|l| match l {
                LightDef::Directional {
                    direction,
                    intensity,
                } => Light::Directional {
                    direction: Vec3(*direction),
                    intensity: Vec3(*intensity),
                },
                LightDef::Point {
                    position,
                    intensity,
                } => Light::Point {
                    position: Vec3(*position),
                    intensity: Vec3(*intensity),
                },
            })
            .collect(),
        ambient: Vec3(def.ambient),
        camera: Camera {
            position: Vec3(def.camera.position),
            look_at: Vec3(def.camera.look_at),
            fov_y_deg: def.camera.fov_y_deg,
            width: def.camera.width,
            height: def.camera.height,
        },
        detail_amplitude: def.detail_amplitude,
    })
}
