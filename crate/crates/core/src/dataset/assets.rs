//! Built-in asset catalog: procedural objects, floor materials, camera
//! viewpoints, and the coat albedo texture pool.

use crate::mesh::shapes;
use crate::noise::value_noise_2d;
use crate::num::Real;
use crate::raster::ColorImage;
use crate::render::{BaseMaterial, Camera, MaterialAlbedo, SceneObject};
use crate::vec3::Vec3;

#[derive(Clone, Debug)]
pub struct CatalogObject<T> {
    pub name: &'static str,
    pub object: SceneObject<T>,
    pub material: BaseMaterial<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct CameraPose<T> {
    pub position: Vec3<T>,
    pub look_at: Vec3<T>,
    pub fov_y_deg: T,
}

impl<T: Real> CameraPose<T> {
    pub fn camera(&self, width: usize, height: usize) -> Camera<T> {
        Camera {
            position: self.position,
            look_at: self.look_at,
            fov_y_deg: self.fov_y_deg,
            width,
            height,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AssetCatalog<T> {
    pub objects: Vec<CatalogObject<T>>,
    pub floors: Vec<BaseMaterial<T>>,
    pub viewpoints: Vec<CameraPose<T>>,
    pub coat_textures: Vec<ColorImage<T>>,
}

const TEXTURE_SIDE: usize = 64;

fn stripes<T: Real>(a: Vec3<T>, b: Vec3<T>, period: usize) -> ColorImage<T> {
    let mut img = ColorImage::new(TEXTURE_SIDE, TEXTURE_SIDE);
    for y in 0..TEXTURE_SIDE {
        for x in 0..TEXTURE_SIDE {
            img.set(x, y, if (x / period) % 2 == 0 { a } else { b });
        }
    }
    img
}

fn dots<T: Real>(bg: Vec3<T>, fg: Vec3<T>, cell: usize, radius: f64) -> ColorImage<T> {
    let mut img = ColorImage::new(TEXTURE_SIDE, TEXTURE_SIDE);
    for y in 0..TEXTURE_SIDE {
        for x in 0..TEXTURE_SIDE {
            let cx = (x % cell) as f64 - cell as f64 / 2.0;
            let cy = (y % cell) as f64 - cell as f64 / 2.0;
            let inside = (cx * cx + cy * cy).sqrt() < radius;
            img.set(x, y, if inside { fg } else { bg });
        }
    }
    img
}

fn rings<T: Real>(a: Vec3<T>, b: Vec3<T>, period: f64) -> ColorImage<T> {
    let mut img = ColorImage::new(TEXTURE_SIDE, TEXTURE_SIDE);
    let c = TEXTURE_SIDE as f64 / 2.0;
    for y in 0..TEXTURE_SIDE {
        for x in 0..TEXTURE_SIDE {
            let r = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
            img.set(x, y, if ((r / period) as usize) % 2 == 0 { a } else { b });
        }
    }
    img
}

fn marble<T: Real>(a: Vec3<T>, b: Vec3<T>, salt: u64) -> ColorImage<T> {
    let mut img = ColorImage::new(TEXTURE_SIDE, TEXTURE_SIDE);
    for y in 0..TEXTURE_SIDE {
        for x in 0..TEXTURE_SIDE {
            let n = value_noise_2d(x as f64 / 9.0, y as f64 / 9.0, salt);
            img.set(x, y, Vec3::lerp(a, b, T::of(n)));
        }
    }
    img
}

fn gradient<T: Real>(a: Vec3<T>, b: Vec3<T>) -> ColorImage<T> {
    let mut img = ColorImage::new(TEXTURE_SIDE, TEXTURE_SIDE);
    for y in 0..TEXTURE_SIDE {
        let t = T::of(y as f64 / (TEXTURE_SIDE - 1) as f64);
        for x in 0..TEXTURE_SIDE {
            img.set(x, y, Vec3::lerp(a, b, t));
        }
    }
    img
}

impl<T: Real> AssetCatalog<T> {
    /// The built-in desk-scale catalog: six objects, four floors, four
    /// orbiting viewpoints, eight coat textures (all patterned).
    pub fn builtin() -> Self {
        let objects = vec![
            CatalogObject {
                name: "sphere",
                object: SceneObject::Sphere {
                    center: Vec3::of(0.0, 0.8, 0.0),
                    radius: T::of(0.8),
                },
                material: BaseMaterial::uniform(Vec3::of(0.58, 0.55, 0.5), T::of(0.45), T::zero()),
            },
            CatalogObject {
                name: "cube",
                object: SceneObject::Mesh(
                    shapes::box_mesh(Vec3::of(0.55, 0.55, 0.55))
                        .rotated_y(T::of(0.42))
                        .compute_vertex_normals()
                        .expect("cube normals")
                        .translated(Vec3::of(0.0, 0.55, 0.0)),
                ),
                material: BaseMaterial::uniform(Vec3::of(0.62, 0.45, 0.3), T::of(0.55), T::zero()),
            },
            CatalogObject {
                name: "torus",
                object: SceneObject::Mesh(
                    shapes::torus(T::of(0.55), T::of(0.22), 28, 14)
                        .translated(Vec3::of(0.0, 0.23, 0.0)),
                ),
                material: BaseMaterial::uniform(Vec3::of(0.35, 0.5, 0.62), T::of(0.35), T::zero()),
            },
            CatalogObject {
                name: "bumpy_sphere",
                object: SceneObject::Mesh(
                    shapes::bumpy_sphere(3, T::of(0.72), T::of(0.09), 2.6, 0xb0b0)
                        .translated(Vec3::of(0.0, 0.78, 0.0)),
                ),
                material: BaseMaterial::uniform(Vec3::of(0.5, 0.56, 0.42), T::of(0.6), T::zero()),
            },
            CatalogObject {
                name: "slab",
                object: SceneObject::Mesh(
                    shapes::box_mesh(Vec3::of(0.85, 0.16, 0.6))
                        .rotated_y(T::of(-0.3))
                        .compute_vertex_normals()
                        .expect("slab normals")
                        .translated(Vec3::of(0.0, 0.16, 0.0)),
                ),
                material: BaseMaterial {
                    albedo: MaterialAlbedo::Texture {
                        image: ColorImage::checker(
                            32,
                            32,
                            8,
                            Vec3::of(0.7, 0.66, 0.6),
                            Vec3::of(0.3, 0.28, 0.26),
                        ),
                        scale: T::one(),
                    },
                    roughness: T::of(0.7),
                    metalness: T::zero(),
                },
            },
            CatalogObject {
                name: "cylinder",
                object: SceneObject::Mesh(
                    shapes::cylinder(T::of(0.42), T::of(1.0), 40)
                        .translated(Vec3::of(0.0, 0.5, 0.0)),
                ),
                material: BaseMaterial::uniform(Vec3::of(0.85, 0.78, 0.6), T::of(0.3), T::one()),
            },
        ];

        let floors = vec![
            BaseMaterial::uniform(Vec3::of(0.72, 0.72, 0.72), T::of(0.8), T::zero()),
            BaseMaterial::uniform(Vec3::of(0.5, 0.42, 0.35), T::of(0.7), T::zero()),
            BaseMaterial {
                albedo: MaterialAlbedo::Texture {
                    image: ColorImage::checker(
                        16,
                        16,
                        8,
                        Vec3::of(0.75, 0.75, 0.78),
                        Vec3::of(0.35, 0.35, 0.4),
                    ),
                    scale: T::of(0.5),
                },
                roughness: T::of(0.6),
                metalness: T::zero(),
            },
            BaseMaterial::uniform(Vec3::of(0.25, 0.27, 0.3), T::of(0.5), T::zero()),
        ];

        let viewpoints = [35.0f64, 125.0, 215.0, 305.0]
            .iter()
            .map(|az| {
                let elev = 26.0f64.to_radians();
                let az = az.to_radians();
                let dist = 3.4;
                CameraPose {
                    position: Vec3::of(
                        dist * elev.cos() * az.cos(),
                        dist * elev.sin() + 0.4,
                        dist * elev.cos() * az.sin(),
                    ),
                    look_at: Vec3::of(0.0, 0.45, 0.0),
                    fov_y_deg: T::of(42.0),
                }
            })
            .collect();

        let coat_textures = vec![
            ColorImage::checker(
                TEXTURE_SIDE,
                TEXTURE_SIDE,
                8,
                Vec3::of(0.85, 0.1, 0.1),
                Vec3::of(0.95, 0.95, 0.92),
            ),
            ColorImage::checker(
                TEXTURE_SIDE,
                TEXTURE_SIDE,
                16,
                Vec3::of(0.12, 0.3, 0.75),
                Vec3::of(0.9, 0.85, 0.2),
            ),
            stripes(Vec3::of(0.1, 0.6, 0.25), Vec3::of(0.92, 0.92, 0.88), 8),
            stripes(Vec3::of(0.55, 0.12, 0.6), Vec3::of(0.15, 0.15, 0.18), 4),
            dots(Vec3::of(0.9, 0.55, 0.1), Vec3::of(0.2, 0.12, 0.35), 16, 5.0),
            rings(Vec3::of(0.16, 0.5, 0.52), Vec3::of(0.88, 0.9, 0.85), 6.0),
            marble(Vec3::of(0.2, 0.2, 0.55), Vec3::of(0.85, 0.88, 0.95), 0x77aa),
            gradient(Vec3::of(0.8, 0.25, 0.1), Vec3::of(0.1, 0.2, 0.7)),
        ];

        AssetCatalog {
            objects,
            floors,
            viewpoints,
            coat_textures,
        }
    }
}
