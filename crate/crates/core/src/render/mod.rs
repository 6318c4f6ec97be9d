//! Deterministic CPU ray-cast renderer producing ground-truth intrinsic
//! channel stacks for uncoated and coated scenes.
//!
//! One primary ray per pixel, binary shadow rays, GGX specular in the
//! metalness workflow, and a per-hit layered model for the coating. Rows
//! render in parallel with no shared mutable state, so output is identical
//! for any thread count.

mod channels;
mod ggx;
mod layer;
mod mask;

pub use channels::{
    read_channel_f32, read_scalar_map_f32, write_channel_f32, write_scalar_map_f32, ChannelMeta,
    ChannelStack, CHANNEL_NAMES,
};
pub use ggx::{f0_from, fresnel_schlick, ggx_d, roughness_to_alpha, smith_g1, specular_brdf};
pub use layer::{effective_transmission, layer_composite, shading_normal};
pub use mask::{generate_mask, generate_mask_with_salt, project_albedo, project_albedo_sized};

use crate::coating::CoatingSpec;
use crate::mesh::TriangleMesh;
use crate::noise::value_noise_3d;
use crate::num::Real;
use crate::raster::{ColorImage, NormalMap, RasterError, ScalarMap};
use crate::vec3::Vec3;
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("camera produces a zero-pixel image")]
    EmptyImage,
    #[error("scene has no lights")]
    NoLights,
    #[error("field of view {0} degrees outside (0, 180)")]
    BadFov(f64),
    #[error("detail amplitude {0} outside [0, 1]")]
    BadDetailAmplitude(f64),
    #[error("scene mesh has no vertex normals")]
    MeshNormalsMissing,
    #[error("coat mask is {got_w}x{got_h} but the camera renders {want_w}x{want_h}")]
    MaskSizeMismatch {
        want_w: usize,
        want_h: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("object silhouette is empty")]
    EmptySilhouette,
    #[error("blended normals cancel to zero")]
    DegenerateNormal,
    #[error("coverage target {0} outside (0, 1]")]
    BadCoverage(f64),
    #[error("channel file {path}: {message}")]
    BadChannelFile { path: String, message: String },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct Camera<T> {
    pub position: Vec3<T>,
    pub look_at: Vec3<T>,
    pub fov_y_deg: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> Camera<T> {
    /// Right-handed basis: `u` right, `v` up, `w` backward.
    fn basis(&self) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
        let w = (self.position - self.look_at).normalized();
        let up = Vec3::new(T::zero(), T::one(), T::zero());
        let u = match up.cross(w).try_normalized() {
            Some(u) => u,
            None => Vec3::new(T::zero(), T::zero(), T::one())
                .cross(w)
                .normalized(),
        };
        let v = w.cross(u);
        (u, v, w)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Light<T> {
    /// `direction` is the direction the light travels.
    Directional {
        direction: Vec3<T>,
        intensity: Vec3<T>,
    },
    /// Inverse-square falloff.
    Point {
        position: Vec3<T>,
        intensity: Vec3<T>,
    },
}

#[derive(Clone, Debug)]
pub enum MaterialAlbedo<T> {
    Uniform(Vec3<T>),
    /// Sampled in world space: floors use tiled XZ mapping, objects use a
    /// spherical mapping around the object center.
    Texture { image: ColorImage<T>, scale: T },
}

#[derive(Clone, Debug)]
pub struct BaseMaterial<T> {
    pub albedo: MaterialAlbedo<T>,
    pub roughness: T,
    pub metalness: T,
}

impl<T: Real> BaseMaterial<T> {
    pub fn uniform(albedo: Vec3<T>, roughness: T, metalness: T) -> Self {
        BaseMaterial {
            albedo: MaterialAlbedo::Uniform(albedo),
            roughness,
            metalness,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SceneObject<T> {
    Sphere { center: Vec3<T>, radius: T },
    Cube { center: Vec3<T>, half_extent: Vec3<T> },
    /// Finite parallelogram: `center +- edge_u +- edge_v`.
    Rect {
        center: Vec3<T>,
        edge_u: Vec3<T>,
        edge_v: Vec3<T>,
    },
    Mesh(TriangleMesh<T>),
}

impl<T: Real> SceneObject<T> {
    fn center_point(&self) -> Vec3<T> {
        match self {
            SceneObject::Sphere { center, .. } => *center,
            SceneObject::Cube { center, .. } => *center,
            SceneObject::Rect { center, .. } => *center,
            SceneObject::Mesh(m) => m.centroid(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Floor<T> {
    pub y: T,
    pub material: BaseMaterial<T>,
}

#[derive(Clone, Debug)]
pub struct SceneSpec<T> {
    pub object: SceneObject<T>,
    pub object_material: BaseMaterial<T>,
    pub floor: Option<Floor<T>>,
    pub lights: Vec<Light<T>>,
    pub ambient: Vec3<T>,
    pub camera: Camera<T>,
    /// Strength of the procedural micro-normal perturbation on the object.
    pub detail_amplitude: T,
}

impl<T: Real> SceneSpec<T> {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.camera.width == 0 || self.camera.height == 0 {
            return Err(RenderError::EmptyImage);
        }
        if self.lights.is_empty() {
            return Err(RenderError::NoLights);
        }
        let fov = self.camera.fov_y_deg.as_f64();
        if !(fov > 0.0 && fov < 180.0) {
            return Err(RenderError::BadFov(fov));
        }
        let amp = self.detail_amplitude.as_f64();
        if !(0.0..=1.0).contains(&amp) {
            return Err(RenderError::BadDetailAmplitude(amp));
        }
        if let SceneObject::Mesh(m) = &self.object {
            if m.normals().is_none() {
                return Err(RenderError::MeshNormalsMissing);
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Ray casting
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct Ray<T> {
    origin: Vec3<T>,
    dir: Vec3<T>,
}

#[derive(Clone, Copy, PartialEq)]
enum HitKind {
    Object,
    Floor,
}

#[derive(Clone, Copy)]
struct SurfaceHit<T> {
    t: T,
    point: Vec3<T>,
    /// Geometric normal, oriented toward the ray origin side.
    n_geom: Vec3<T>,
    /// Smooth shading normal (interpolated or analytic).
    n_smooth: Vec3<T>,
    kind: HitKind,
}

const T_MIN: f64 = 1e-4;
const SHADOW_BIAS: f64 = 1e-3;
const DETAIL_NOISE_FREQ: f64 = 9.0;
const DETAIL_NOISE_SALTS: [u64; 3] = [0x51ee7, 0xb0a7, 0xc0ffee];

fn intersect_sphere<T: Real>(center: Vec3<T>, radius: T, ray: &Ray<T>) -> Option<T> {
    let oc = ray.origin - center;
    let b = oc.dot(ray.dir);
    let c = oc.length_squared() - radius * radius;
    let disc = b * b - c;
    if disc < T::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = -b - sq;
    let t1 = -b + sq;
    let tmin = T::of(T_MIN);
    if t0 > tmin {
        Some(t0)
    } else if t1 > tmin {
        Some(t1)
    } else {
        None
    }
}

fn intersect_box<T: Real>(
    center: Vec3<T>,
    half: Vec3<T>,
    ray: &Ray<T>,
) -> Option<(T, Vec3<T>)> {
    let mut t_near = T::neg_infinity();
    let mut t_far = T::infinity();
    let mut axis_near = 0usize;
    for k in 0..3 {
        let o = ray.origin.0[k] - center.0[k];
        let d = ray.dir.0[k];
        let h = half.0[k];
        if d.abs() < T::of(1e-12) {
            if o.abs() > h {
                return None;
            }
            continue;
        }
        let inv = T::one() / d;
        let mut t0 = (-h - o) * inv;
        let mut t1 = (h - o) * inv;
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0 > t_near {
            t_near = t0;
            axis_near = k;
        }
        t_far = t_far.min(t1);
        if t_near > t_far {
            return None;
        }
    }
    let tmin = T::of(T_MIN);
    let t = if t_near > tmin {
        t_near
    } else if t_far > tmin {
        t_far
    } else {
        return None;
    };
    let p = ray.origin + ray.dir * t;
    let mut n = Vec3::zero();
    n.0[axis_near] = (p.0[axis_near] - center.0[axis_near]).signum();
    Some((t, n))
}

fn intersect_rect<T: Real>(
    center: Vec3<T>,
    edge_u: Vec3<T>,
    edge_v: Vec3<T>,
    ray: &Ray<T>,
) -> Option<(T, Vec3<T>)> {
    let n = edge_u.cross(edge_v).try_normalized()?;
    let denom = ray.dir.dot(n);
    if denom.abs() < T::of(1e-12) {
        return None;
    }
    let t = (center - ray.origin).dot(n) / denom;
    if t <= T::of(T_MIN) {
        return None;
    }
    let q = ray.origin + ray.dir * t - center;
    let a = q.dot(edge_u) / edge_u.length_squared();
    let b = q.dot(edge_v) / edge_v.length_squared();
    if a.abs() > T::one() || b.abs() > T::one() {
        return None;
    }
    // Two-sided: orient toward the ray origin.
    let n = if denom > T::zero() { -n } else { n };
    Some((t, n))
}

struct MeshHit<T> {
    t: T,
    face: usize,
    bary: (T, T, T),
}

fn intersect_mesh<T: Real>(
    mesh: &TriangleMesh<T>,
    aabb: &(Vec3<T>, Vec3<T>),
    ray: &Ray<T>,
) -> Option<MeshHit<T>> {
    // AABB early out.
    {
        let (lo, hi) = aabb;
        let mut t0 = T::of(T_MIN);
        let mut t1 = T::infinity();
        for k in 0..3 {
            let d = ray.dir.0[k];
            let o = ray.origin.0[k];
            if d.abs() < T::of(1e-12) {
                if o < lo.0[k] || o > hi.0[k] {
                    return None;
                }
                continue;
            }
            let inv = T::one() / d;
            let mut a = (lo.0[k] - o) * inv;
            let mut b = (hi.0[k] - o) * inv;
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return None;
            }
        }
    }
    let mut best: Option<MeshHit<T>> = None;
    let eps = T::of(1e-12);
    let tmin = T::of(T_MIN);
    for (fi, f) in mesh.faces().iter().enumerate() {
        let v0 = mesh.vertices()[f[0]];
        let e1 = mesh.vertices()[f[1]] - v0;
        let e2 = mesh.vertices()[f[2]] - v0;
        let pvec = ray.dir.cross(e2);
        let det = e1.dot(pvec);
        if det.abs() < eps {
            continue;
        }
        let inv_det = T::one() / det;
        let tvec = ray.origin - v0;
        let u = tvec.dot(pvec) * inv_det;
        if u < T::zero() || u > T::one() {
            continue;
        }
        let qvec = tvec.cross(e1);
        let v = ray.dir.dot(qvec) * inv_det;
        if v < T::zero() || u + v > T::one() {
            continue;
        }
        let t = e2.dot(qvec) * inv_det;
        if t <= tmin {
            continue;
        }
        if best.as_ref().is_none_or(|b| t < b.t) {
            best = Some(MeshHit {
                t,
                face: fi,
                bary: (T::one() - u - v, u, v),
            });
        }
    }
    best
}

/// Precomputed per-render state.
struct RenderCtx<'a, T: Real> {
    scene: &'a SceneSpec<T>,
    coat: Option<&'a CoatingSpec<T>>,
    cam_u: Vec3<T>,
    cam_v: Vec3<T>,
    cam_w: Vec3<T>,
    tan_half_fov: T,
    aspect: T,
    mesh_aabb: Option<(Vec3<T>, Vec3<T>)>,
    object_center: Vec3<T>,
}

impl<'a, T: Real> RenderCtx<'a, T> {
    fn new(scene: &'a SceneSpec<T>, coat: Option<&'a CoatingSpec<T>>) -> Self {
        let (cam_u, cam_v, cam_w) = scene.camera.basis();
        let tan_half_fov =
            (scene.camera.fov_y_deg.as_f64().to_radians() / 2.0).tan();
        let mesh_aabb = match &scene.object {
            SceneObject::Mesh(m) => Some(m.aabb()),
            _ => None,
        };
        RenderCtx {
            scene,
            coat,
            cam_u,
            cam_v,
            cam_w,
            tan_half_fov: T::of(tan_half_fov),
            aspect: T::of(scene.camera.width as f64 / scene.camera.height as f64),
            mesh_aabb,
            object_center: scene.object.center_point(),
        }
    }

    fn primary_ray(&self, x: usize, y: usize) -> Ray<T> {
        let w = self.scene.camera.width as f64;
        let h = self.scene.camera.height as f64;
        let px = T::of(2.0 * (x as f64 + 0.5) / w - 1.0) * self.tan_half_fov * self.aspect;
        let py = T::of(1.0 - 2.0 * (y as f64 + 0.5) / h) * self.tan_half_fov;
        let dir = (self.cam_u * px + self.cam_v * py - self.cam_w).normalized();
        Ray {
            origin: self.scene.camera.position,
            dir,
        }
    }

    fn world_to_camera(&self, n: Vec3<T>) -> Vec3<T> {
        Vec3::new(n.dot(self.cam_u), n.dot(self.cam_v), n.dot(self.cam_w))
    }

    fn hit_object(&self, ray: &Ray<T>) -> Option<SurfaceHit<T>> {
        match &self.scene.object {
            SceneObject::Sphere { center, radius } => {
                let t = intersect_sphere(*center, *radius, ray)?;
                let point = ray.origin + ray.dir * t;
                let n = (point - *center).normalized();
                let n_geom = if n.dot(ray.dir) > T::zero() { -n } else { n };
                Some(SurfaceHit {
                    t,
                    point,
                    n_geom,
                    n_smooth: n_geom,
                    kind: HitKind::Object,
                })
            }
            SceneObject::Cube {
                center,
                half_extent,
            } => {
                let (t, n) = intersect_box(*center, *half_extent, ray)?;
                Some(SurfaceHit {
                    t,
                    point: ray.origin + ray.dir * t,
                    n_geom: n,
                    n_smooth: n,
                    kind: HitKind::Object,
                })
            }
            SceneObject::Rect {
                center,
                edge_u,
                edge_v,
            } => {
                let (t, n) = intersect_rect(*center, *edge_u, *edge_v, ray)?;
                Some(SurfaceHit {
                    t,
                    point: ray.origin + ray.dir * t,
                    n_geom: n,
                    n_smooth: n,
                    kind: HitKind::Object,
                })
            }
            SceneObject::Mesh(mesh) => {
                let aabb = self.mesh_aabb.as_ref().expect("mesh aabb cached");
                let hit = intersect_mesh(mesh, aabb, ray)?;
                let f = mesh.faces()[hit.face];
                let v0 = mesh.vertices()[f[0]];
                let e1 = mesh.vertices()[f[1]] - v0;
                let e2 = mesh.vertices()[f[2]] - v0;
                let mut n_geom = e1.cross(e2).normalized();
                if n_geom.dot(ray.dir) > T::zero() {
                    n_geom = -n_geom;
                }
                let normals = mesh.normals().expect("validated");
                let (b0, b1, b2) = hit.bary;
                let n_smooth = (normals[f[0]] * b0 + normals[f[1]] * b1 + normals[f[2]] * b2)
                    .try_normalized()
                    .unwrap_or(n_geom);
                let n_smooth = if n_smooth.dot(n_geom) < T::zero() {
                    -n_smooth
                } else {
                    n_smooth
                };
                Some(SurfaceHit {
                    t: hit.t,
                    point: ray.origin + ray.dir * hit.t,
                    n_geom,
                    n_smooth,
                    kind: HitKind::Object,
                })
            }
        }
    }

    fn hit_floor(&self, ray: &Ray<T>) -> Option<SurfaceHit<T>> {
        let floor = self.scene.floor.as_ref()?;
        let d = ray.dir.y();
        if d.abs() < T::of(1e-12) {
            return None;
        }
        let t = (floor.y - ray.origin.y()) / d;
        if t <= T::of(T_MIN) {
            return None;
        }
        let up = Vec3::new(T::zero(), T::one(), T::zero());
        let n = if d > T::zero() { -up } else { up };
        Some(SurfaceHit {
            t,
            point: ray.origin + ray.dir * t,
            n_geom: n,
            n_smooth: n,
            kind: HitKind::Floor,
        })
    }

    fn intersect(&self, ray: &Ray<T>) -> Option<SurfaceHit<T>> {
        match (self.hit_object(ray), self.hit_floor(ray)) {
            (Some(a), Some(b)) => Some(if a.t <= b.t { a } else { b }),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        }
    }

    fn occluded(&self, origin: Vec3<T>, dir: Vec3<T>, max_t: T) -> bool {
        if let Some(hit) = self.hit_object(&Ray { origin, dir }) {
            if hit.t < max_t {
                return true;
            }
        }
        if let Some(hit) = self.hit_floor(&Ray { origin, dir }) {
            if hit.t < max_t {
                return true;
            }
        }
        false
    }

    /// Per-light unit direction, arriving radiance, and binary visibility.
    fn light_samples(&self, point: Vec3<T>, n_geom: Vec3<T>) -> Vec<(Vec3<T>, Vec3<T>, T)> {
        let origin = point + n_geom * T::of(SHADOW_BIAS);
        self.scene
            .lights
            .iter()
            .map(|light| match light {
                Light::Directional {
                    direction,
                    intensity,
                } => {
                    let l = (-*direction).normalized();
                    let vis = if self.occluded(origin, l, T::infinity()) {
                        T::zero()
                    } else {
                        T::one()
                    };
                    (l, *intensity, vis)
                }
                Light::Point {
                    position,
                    intensity,
                } => {
                    let delta = *position - point;
                    let dist = delta.length();
                    let l = delta / dist;
                    let vis = if self.occluded(origin, l, dist) {
                        T::zero()
                    } else {
                        T::one()
                    };
                    (l, *intensity / (dist * dist), vis)
                }
            })
            .collect()
    }

    fn sample_base_albedo(&self, material: &BaseMaterial<T>, kind: HitKind, p: Vec3<T>) -> Vec3<T> {
        match &material.albedo {
            MaterialAlbedo::Uniform(c) => *c,
            MaterialAlbedo::Texture { image, scale } => {
                let (u, v) = match kind {
                    HitKind::Floor => {
                        let u = (p.x() * *scale).fract();
                        let v = (p.z() * *scale).fract();
                        let wrap = |t: T| if t < T::zero() { t + T::one() } else { t };
                        (wrap(u), wrap(v))
                    }
                    HitKind::Object => {
                        let d = (p - self.object_center)
                            .try_normalized()
                            .unwrap_or_else(|| Vec3::new(T::zero(), T::one(), T::zero()));
                        let u = T::of(0.5) + d.z().atan2(d.x()) / T::TAU();
                        let v = T::of(0.5) - d.y().asin() / T::PI();
                        (u, v)
                    }
                };
                let tx = u * T::of(image.width() as f64 - 1.0);
                let ty = v * T::of(image.height() as f64 - 1.0);
                image.sample_bilinear(tx, ty)
            }
        }
    }

    fn coat_albedo_at(&self, coat: &CoatingSpec<T>, x: usize, y: usize) -> Vec3<T> {
        match &coat.albedo {
            crate::coating::CoatAlbedo::Uniform(c) => *c,
            crate::coating::CoatAlbedo::Texture(tex) => {
                let w = self.scene.camera.width as f64;
                let h = self.scene.camera.height as f64;
                let u = (x as f64 + 0.5) / w;
                let v = (y as f64 + 0.5) / h;
                let tx = T::of(u * tex.width() as f64 - 0.5);
                let ty = T::of(v * tex.height() as f64 - 0.5);
                tex.sample_bilinear(tx, ty)
            }
        }
    }

    fn perturb_normal(&self, n: Vec3<T>, p: Vec3<T>) -> Vec3<T> {
        let amp = self.scene.detail_amplitude;
        if amp == T::zero() {
            return n;
        }
        let f = DETAIL_NOISE_FREQ;
        let px = p.x().as_f64() * f;
        let py = p.y().as_f64() * f;
        let pz = p.z().as_f64() * f;
        let bump = Vec3::new(
            T::of(2.0 * value_noise_3d(px, py, pz, DETAIL_NOISE_SALTS[0]) - 1.0),
            T::of(2.0 * value_noise_3d(px, py, pz, DETAIL_NOISE_SALTS[1]) - 1.0),
            T::of(2.0 * value_noise_3d(px, py, pz, DETAIL_NOISE_SALTS[2]) - 1.0),
        );
        (n + bump * amp).try_normalized().unwrap_or(n)
    }
}

fn irradiance<T: Real>(samples: &[(Vec3<T>, Vec3<T>, T)], n: Vec3<T>, ambient: Vec3<T>) -> Vec3<T> {
    let mut total = Vec3::zero();
    for (l, radiance, vis) in samples {
        total += *radiance * (n.dot(*l).max(T::zero()) * *vis);
    }
    total + ambient
}

fn specular_sum<T: Real>(
    samples: &[(Vec3<T>, Vec3<T>, T)],
    n: Vec3<T>,
    view: Vec3<T>,
    roughness: T,
    f0: Vec3<T>,
) -> Vec3<T> {
    let mut total = Vec3::zero();
    for (l, radiance, vis) in samples {
        let ndl = n.dot(*l).max(T::zero());
        if ndl > T::zero() && *vis > T::zero() {
            total += *radiance * specular_brdf(n, view, *l, roughness, f0) * (ndl * *vis);
        }
    }
    total
}

struct PixelOut<T> {
    image: Vec3<T>,
    albedo: Vec3<T>,
    shading: Vec3<T>,
    residual: Vec3<T>,
    normal_cam: Vec3<T>,
    depth: T,
    object_mask: T,
}

fn shade_pixel<T: Real>(ctx: &RenderCtx<'_, T>, x: usize, y: usize) -> PixelOut<T> {
    let ray = ctx.primary_ray(x, y);
    let hit = match ctx.intersect(&ray) {
        Some(h) => h,
        None => {
            let ambient = ctx.scene.ambient;
            return PixelOut {
                image: ambient,
                albedo: Vec3::zero(),
                shading: Vec3::zero(),
                residual: ambient, // image - albedo * shading with both zero
                normal_cam: Vec3::zero(),
                depth: T::infinity(),
                object_mask: T::zero(),
            };
        }
    };

    let view = -ray.dir;
    let samples = ctx.light_samples(hit.point, hit.n_geom);
    let material = match hit.kind {
        HitKind::Object => &ctx.scene.object_material,
        HitKind::Floor => &ctx.scene.floor.as_ref().expect("floor hit").material,
    };
    let albedo_base = ctx.sample_base_albedo(material, hit.kind, hit.point);
    let n_detail = match hit.kind {
        HitKind::Object => ctx.perturb_normal(hit.n_smooth, hit.point),
        HitKind::Floor => hit.n_smooth,
    };
    let irr_base = irradiance(&samples, n_detail, ctx.scene.ambient);
    let spec_base = specular_sum(
        &samples,
        n_detail,
        view,
        material.roughness,
        f0_from(albedo_base, material.metalness),
    );
    let base_color = albedo_base * irr_base * (T::one() - material.metalness) + spec_base;

    let coat_applies = matches!(hit.kind, HitKind::Object)
        && ctx
            .coat
            .map(|c| c.mask.get(x, y) > T::zero())
            .unwrap_or(false);

    let (image, albedo_out, shading_out, normal_out) = if coat_applies {
        let coat = ctx.coat.expect("checked above");
        let m = coat.mask.get(x, y);
        let tv = coat.traits;
        let t_eff = effective_transmission(tv.transmission, tv.thickness);
        let n_coat = shading_normal(n_detail, hit.n_smooth, tv.thickness).unwrap_or(hit.n_smooth);
        let albedo_coat = ctx.coat_albedo_at(coat, x, y);
        let irr_coat = irradiance(&samples, n_coat, ctx.scene.ambient);
        // Diffuse body of the coat sits inside the composite; the coat's
        // specular lobe persists (surface reflection off the coat) even
        // when the body is fully transmissive.
        let coat_diffuse = albedo_coat * irr_coat * (T::one() - tv.metalness);
        let spec_coat = specular_sum(
            &samples,
            n_coat,
            view,
            tv.roughness,
            f0_from(albedo_coat, tv.metalness),
        );
        let image = layer_composite(base_color, coat_diffuse, t_eff, m) + spec_coat * m;
        let albedo_out = layer_composite(albedo_base, albedo_coat, t_eff, m);
        let shading_out = Vec3::lerp(irr_base, irr_coat, m);
        let normal_out = (n_detail * (T::one() - m) + n_coat * m)
            .try_normalized()
            .unwrap_or(n_coat);
        (image, albedo_out, shading_out, normal_out)
    } else {
        (base_color, albedo_base, irr_base, n_detail)
    };

    PixelOut {
        image,
        albedo: albedo_out,
        shading: shading_out,
        residual: image - albedo_out * shading_out,
        normal_cam: ctx.world_to_camera(normal_out),
        depth: hit.t,
        object_mask: match hit.kind {
            HitKind::Object => T::one(),
            HitKind::Floor => T::zero(),
        },
    }
}

fn render_impl<T: Real>(
    scene: &SceneSpec<T>,
    coat: Option<&CoatingSpec<T>>,
) -> Result<ChannelStack<T>, RenderError> {
    scene.validate()?;
    if let Some(c) = coat {
        if c.mask.width() != scene.camera.width || c.mask.height() != scene.camera.height {
            return Err(RenderError::MaskSizeMismatch {
                want_w: scene.camera.width,
                want_h: scene.camera.height,
                got_w: c.mask.width(),
                got_h: c.mask.height(),
            });
        }
    }
    let ctx = RenderCtx::new(scene, coat);
    let (w, h) = (scene.camera.width, scene.camera.height);

    let rows: Vec<Vec<PixelOut<T>>> = (0..h)
        .into_par_iter()
        .map(|y| (0..w).map(|x| shade_pixel(&ctx, x, y)).collect())
        .collect();

    let mut image = ColorImage::new(w, h);
    let mut albedo = ColorImage::new(w, h);
    let mut shading = ColorImage::new(w, h);
    let mut residual = ColorImage::new(w, h);
    let mut normals = NormalMap::new(w, h);
    let mut depth = ScalarMap::new(w, h);
    let mut object_mask = ScalarMap::new(w, h);
    for (y, row) in rows.into_iter().enumerate() {
        for (x, px) in row.into_iter().enumerate() {
            image.set(x, y, px.image);
            albedo.set(x, y, px.albedo);
            shading.set(x, y, px.shading);
            residual.set(x, y, px.residual);
            normals.set(x, y, px.normal_cam);
            depth.set(x, y, px.depth);
            object_mask.set(x, y, px.object_mask);
        }
    }
    Ok(ChannelStack {
        image,
        albedo,
        normals,
        depth,
        shading,
        residual,
        object_mask,
    })
}

/// Render the scene without any coating.
pub fn render_uncoated<T: Real>(scene: &SceneSpec<T>) -> Result<ChannelStack<T>, RenderError> {
    render_impl(scene, None)
}

/// Render the scene with the coating applied inside its mask. Geometry
/// (depth, object mask) matches the uncoated render exactly, and pixels
/// with zero mask are bit-identical to it.
pub fn render_coated<T: Real>(
    scene: &SceneSpec<T>,
    coat: &CoatingSpec<T>,
) -> Result<ChannelStack<T>, RenderError> {
    render_impl(scene, Some(coat))
}

#[cfg(test)]
mod tests;
#[cfg(test)]
pub(crate) mod tests_support;
