//! Synthetic dataset generation: scene sampling, coated scene groups with a
//! shared mask, training-sample construction for the add/replace/remove
//! tasks, and the on-disk manifest.

mod assets;
mod manifest;

pub use assets::{AssetCatalog, CameraPose, CatalogObject};
pub use manifest::{
    sha256_hex, AlbedoRecord, ChannelPaths, CoatingRecord, GroupRecord, Manifest, ManifestError,
    VariantRecord, MANIFEST_FILE, MANIFEST_VERSION,
};

use crate::coating::{CoatAlbedo, CoatingError, CoatingSpec, TraitVector};
use crate::num::Real;
use crate::raster::{ColorImage, RasterError, ScalarMap};
use crate::render::{
    self, generate_mask_with_salt, project_albedo_sized, read_channel_f32, ChannelStack, Floor,
    Light, RenderError, SceneSpec,
};
use crate::rng::Rng;
use crate::vec3::Vec3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("asset catalog has no {0}")]
    EmptyCatalog(&'static str),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("albedo pool is empty")]
    EmptyAlbedoPool,
    #[error("replace task needs at least 2 variants, group has {0}")]
    InsufficientVariants(usize),
    #[error("group has no variants")]
    NoVariants,
    #[error("dataset images are {got}px but the config expects {want}px")]
    SizeMismatch { want: usize, got: usize },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Coating(#[from] CoatingError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Generation parameters; JSON config files mirror these field names 1:1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub image_width: usize,
    pub image_height: usize,
    /// Objects drawn from the built-in catalog (max 6).
    pub object_count: usize,
    /// Viewpoints drawn from the built-in catalog (max 4).
    pub viewpoint_count: usize,
    pub variants_per_group: usize,
    /// Cap on the number of scene groups; `null` keeps the full
    /// object x viewpoint product.
    pub group_limit: Option<usize>,
    pub coverage_min: f64,
    pub coverage_max: f64,
    pub detail_amplitude: f64,
    /// Probability that a coating draws a uniform color instead of a
    /// texture from the pool.
    pub uniform_albedo_probability: f64,
    /// Probability that the binary metalness trait draws "on".
    pub metalness_probability: f64,
    /// Probability that the binary transmission trait draws "on".
    pub transmissive_probability: f64,
    /// Thickness sampling range (uniform).
    pub thickness_min: f64,
    pub thickness_max: f64,
    /// Point-light sampling bounds: distance from the origin and power.
    pub light_distance_min: f64,
    pub light_distance_max: f64,
    pub light_power_min: f64,
    pub light_power_max: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            image_width: 128,
            image_height: 128,
            object_count: 6,
            viewpoint_count: 4,
            variants_per_group: 8,
            group_limit: None,
            coverage_min: 0.35,
            coverage_max: 0.85,
            detail_amplitude: 0.35,
            uniform_albedo_probability: 0.5,
            metalness_probability: 0.5,
            transmissive_probability: 0.5,
            thickness_min: 0.0,
            thickness_max: 1.0,
            light_distance_min: 4.0,
            light_distance_max: 6.0,
            light_power_min: 14.0,
            light_power_max: 30.0,
        }
    }
}

/// The three editing tasks drawn during training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Add,
    Replace,
    Remove,
}

/// Task conditioning as the model sees it: adds split by albedo kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrainingTask {
    AddTextured,
    AddUniform,
    Replace,
    Remove,
}

impl TrainingTask {
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        match self {
            TrainingTask::AddTextured => 0,
            TrainingTask::AddUniform => 1,
            TrainingTask::Replace => 2,
            TrainingTask::Remove => 3,
        }
    }
}

/// i.i.d. task draws at the 34:33:33 add/replace/remove ratio.
pub fn sample_task_mixture(rng: &mut Rng, n: usize) -> Vec<Task> {
    (0..n)
        .map(|_| {
            let u = rng.next_f64();
            if u < 0.34 {
                Task::Add
            } else if u < 0.67 {
                Task::Replace
            } else {
                Task::Remove
            }
        })
        .collect()
}

/// Coating parameters before the mask is attached. Roughness and thickness
/// are continuous; metalness and transmission are binary on/off draws.
#[derive(Clone, Debug, PartialEq)]
pub struct CoatingDraw<T> {
    pub traits: TraitVector<T>,
    pub albedo: AlbedoDraw<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlbedoDraw<T> {
    Uniform(Vec3<T>),
    Texture(usize),
}

impl<T: Real> CoatingDraw<T> {
    pub fn resolve(&self, textures: &[ColorImage<T>], mask: ScalarMap<T>) -> CoatingSpec<T> {
        let albedo = match &self.albedo {
            AlbedoDraw::Uniform(c) => CoatAlbedo::Uniform(*c),
            AlbedoDraw::Texture(i) => CoatAlbedo::Texture(textures[*i].clone()),
        };
        CoatingSpec {
            traits: self.traits,
            albedo,
            mask,
        }
    }

    pub fn to_record(&self) -> CoatingRecord {
        CoatingRecord {
            roughness: self.traits.roughness.as_f64(),
            metalness: self.traits.metalness.as_f64(),
            transmission: self.traits.transmission.as_f64(),
            thickness: self.traits.thickness.as_f64(),
            albedo: match &self.albedo {
                AlbedoDraw::Uniform(c) => AlbedoRecord::Uniform {
                    rgb: [c.x().as_f64(), c.y().as_f64(), c.z().as_f64()],
                },
                AlbedoDraw::Texture(i) => AlbedoRecord::Texture { index: *i },
            },
        }
    }

    pub fn from_record(rec: &CoatingRecord) -> Self {
        CoatingDraw {
            traits: TraitVector {
                roughness: T::of(rec.roughness),
                metalness: T::of(rec.metalness),
                transmission: T::of(rec.transmission),
                thickness: T::of(rec.thickness),
            },
            albedo: match &rec.albedo {
                AlbedoRecord::Uniform { rgb } => {
                    AlbedoDraw::Uniform(Vec3::of(rgb[0], rgb[1], rgb[2]))
                }
                AlbedoRecord::Texture { index } => AlbedoDraw::Texture(*index),
            },
        }
    }
}

/// Coat trait distribution knobs; defaults mirror the dataset defaults
/// (binary traits at probability 1/2, thickness uniform on [0, 1]).
#[derive(Clone, Copy, Debug)]
pub struct CoatProfile {
    pub uniform_albedo_probability: f64,
    pub metalness_probability: f64,
    pub transmissive_probability: f64,
    pub thickness_min: f64,
    pub thickness_max: f64,
}

impl Default for CoatProfile {
    fn default() -> Self {
        CoatProfile {
            uniform_albedo_probability: 0.5,
            metalness_probability: 0.5,
            transmissive_probability: 0.5,
            thickness_min: 0.0,
            thickness_max: 1.0,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |msg: &str| Err(DatasetError::BadConfig(msg.to_string()));
        if self.image_width == 0 || self.image_height == 0 {
            return bad("image dimensions must be positive");
        }
        if self.object_count == 0 || self.viewpoint_count == 0 || self.variants_per_group == 0 {
            return bad("object_count, viewpoint_count, and variants_per_group must be positive");
        }
        if !(self.coverage_min > 0.0
            && self.coverage_min <= self.coverage_max
            && self.coverage_max <= 1.0)
        {
            return bad("coverage bounds must satisfy 0 < min <= max <= 1");
        }
        if !(0.0..=1.0).contains(&self.detail_amplitude) {
            return bad("detail_amplitude must be in [0, 1]");
        }
        for (name, p) in [
            ("uniform_albedo_probability", self.uniform_albedo_probability),
            ("metalness_probability", self.metalness_probability),
            ("transmissive_probability", self.transmissive_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(DatasetError::BadConfig(format!("{name} must be in [0, 1]")));
            }
        }
        if !(0.0 <= self.thickness_min
            && self.thickness_min <= self.thickness_max
            && self.thickness_max <= 1.0)
        {
            return bad("thickness bounds must satisfy 0 <= min <= max <= 1");
        }
        if !(self.light_distance_min > 0.0 && self.light_distance_min <= self.light_distance_max)
        {
            return bad("light distance bounds must satisfy 0 < min <= max");
        }
        if !(self.light_power_min > 0.0 && self.light_power_min <= self.light_power_max) {
            return bad("light power bounds must satisfy 0 < min <= max");
        }
        Ok(())
    }

    pub fn coat_profile(&self) -> CoatProfile {
        CoatProfile {
            uniform_albedo_probability: self.uniform_albedo_probability,
            metalness_probability: self.metalness_probability,
            transmissive_probability: self.transmissive_probability,
            thickness_min: self.thickness_min,
            thickness_max: self.thickness_max,
        }
    }
}

pub(crate) fn draw_coating<T: Real>(
    rng: &mut Rng,
    pool_len: usize,
    profile: &CoatProfile,
) -> CoatingDraw<T> {
    let roughness = rng.next_real();
    let metalness = if rng.chance(profile.metalness_probability) {
        T::one()
    } else {
        T::zero()
    };
    let transmission = if rng.chance(profile.transmissive_probability) {
        T::one()
    } else {
        T::zero()
    };
    let thickness = T::of(rng.range(profile.thickness_min, profile.thickness_max));
    let albedo = if rng.chance(profile.uniform_albedo_probability) || pool_len == 0 {
        AlbedoDraw::Uniform(Vec3::of(
            rng.range(0.05, 0.95),
            rng.range(0.05, 0.95),
            rng.range(0.05, 0.95),
        ))
    } else {
        AlbedoDraw::Texture(rng.next_below(pool_len))
    };
    CoatingDraw {
        traits: TraitVector {
            roughness,
            metalness,
            transmission,
            thickness,
        },
        albedo,
    }
}

/// Draw a full coating for a given mask. Errors on an empty albedo pool.
pub fn sample_coating<T: Real>(
    rng: &mut Rng,
    albedo_pool: &[ColorImage<T>],
    mask: ScalarMap<T>,
) -> Result<CoatingSpec<T>, DatasetError> {
    if albedo_pool.is_empty() {
        return Err(DatasetError::EmptyAlbedoPool);
    }
    let draw = draw_coating::<T>(rng, albedo_pool.len(), &CoatProfile::default());
    Ok(draw.resolve(albedo_pool, mask))
}

/// Build the scene for one (object, viewpoint) cell: floor, ambient tint,
/// and two point lights are drawn from `rng`.
pub fn scene_for_cell<T: Real>(
    rng: &mut Rng,
    catalog: &AssetCatalog<T>,
    config: &DatasetConfig,
    object_index: usize,
    viewpoint_index: usize,
) -> Result<SceneSpec<T>, DatasetError> {
    if catalog.objects.is_empty() {
        return Err(DatasetError::EmptyCatalog("objects"));
    }
    if catalog.viewpoints.is_empty() {
        return Err(DatasetError::EmptyCatalog("viewpoints"));
    }
    if catalog.floors.is_empty() {
        return Err(DatasetError::EmptyCatalog("floors"));
    }
    let obj = &catalog.objects[object_index % catalog.objects.len()];
    let pose = &catalog.viewpoints[viewpoint_index % catalog.viewpoints.len()];
    let floor_idx = rng.next_below(catalog.floors.len());
    let ambient_level = rng.range(0.05, 0.14);
    let ambient = Vec3::of(
        ambient_level * rng.range(0.85, 1.15),
        ambient_level * rng.range(0.85, 1.15),
        ambient_level * rng.range(0.85, 1.15),
    );
    let mut lights = Vec::with_capacity(2);
    for _ in 0..2 {
        let az = rng.range(0.0, std::f64::consts::TAU);
        let elev = rng.range(25.0, 70.0).to_radians();
        let dist = rng.range(config.light_distance_min, config.light_distance_max);
        let power = rng.range(config.light_power_min, config.light_power_max);
        lights.push(Light::Point {
            position: Vec3::of(
                dist * elev.cos() * az.cos(),
                dist * elev.sin(),
                dist * elev.cos() * az.sin(),
            ),
            intensity: Vec3::of(
                power * rng.range(0.85, 1.0),
                power * rng.range(0.85, 1.0),
                power * rng.range(0.85, 1.0),
            ),
        });
    }
    Ok(SceneSpec {
        object: obj.object.clone(),
        object_material: obj.material.clone(),
        floor: Some(Floor {
            y: T::zero(),
            material: catalog.floors[floor_idx].clone(),
        }),
        lights,
        ambient,
        camera: pose.camera(config.image_width, config.image_height),
        detail_amplitude: T::of(config.detail_amplitude),
    })
}

/// Draw one scene: object and viewpoint indices are sampled, the rest is
/// delegated to `scene_for_cell`.
pub fn sample_scene<T: Real>(
    rng: &mut Rng,
    catalog: &AssetCatalog<T>,
    config: &DatasetConfig,
) -> Result<SceneSpec<T>, DatasetError> {
    if catalog.objects.is_empty() {
        return Err(DatasetError::EmptyCatalog("objects"));
    }
    let object_index = rng.next_below(catalog.objects.len().min(config.object_count.max(1)));
    let viewpoint_index = rng.next_below(catalog.viewpoints.len().min(config.viewpoint_count.max(1)));
    scene_for_cell(rng, catalog, config, object_index, viewpoint_index)
}

/// Everything sampled for one scene group, fixed before any rendering, so
/// evaluation can replay the draws without touching the renderer.
#[derive(Clone, Debug)]
pub struct GroupPlan<T> {
    pub cell_index: u64,
    pub object_index: usize,
    pub viewpoint_index: usize,
    pub scene: SceneSpec<T>,
    pub coverage: T,
    pub mask_salt: u64,
    pub coatings: Vec<CoatingDraw<T>>,
}

pub fn plan_group<T: Real>(
    master_seed: u64,
    cell_index: u64,
    object_index: usize,
    viewpoint_index: usize,
    catalog: &AssetCatalog<T>,
    config: &DatasetConfig,
) -> Result<GroupPlan<T>, DatasetError> {
    let mut rng = Rng::stream(master_seed, cell_index);
    let scene = scene_for_cell(&mut rng, catalog, config, object_index, viewpoint_index)?;
    let coverage = T::of(rng.range(config.coverage_min, config.coverage_max));
    let mask_salt = rng.next_u64();
    if catalog.coat_textures.is_empty() {
        return Err(DatasetError::EmptyAlbedoPool);
    }
    let profile = config.coat_profile();
    let coatings = (0..config.variants_per_group)
        .map(|_| draw_coating(&mut rng, catalog.coat_textures.len(), &profile))
        .collect();
    Ok(GroupPlan {
        cell_index,
        object_index,
        viewpoint_index,
        scene,
        coverage,
        mask_salt,
        coatings,
    })
}

#[derive(Clone, Debug)]
pub struct VariantData<T> {
    pub draw: CoatingDraw<T>,
    pub stack: ChannelStack<T>,
    pub projected_albedo: ColorImage<T>,
}

/// One sampled scene with its uncoated render and coated variants sharing
/// a single mask.
#[derive(Clone, Debug)]
pub struct SceneGroupData<T> {
    pub scene_id: String,
    pub cell_index: u64,
    pub object_index: usize,
    pub viewpoint_index: usize,
    pub scene: SceneSpec<T>,
    pub original: ChannelStack<T>,
    pub mask: ScalarMap<T>,
    pub variants: Vec<VariantData<T>>,
}

pub fn scene_id(object_index: usize, viewpoint_index: usize) -> String {
    format!("scene_{object_index:02}_{viewpoint_index:02}")
}

/// Render everything a plan describes.
pub fn realize_group<T: Real>(
    plan: &GroupPlan<T>,
    textures: &[ColorImage<T>],
) -> Result<SceneGroupData<T>, DatasetError> {
    let original = render::render_uncoated(&plan.scene)?;
    let mask = generate_mask_with_salt(&original, plan.mask_salt, plan.coverage)?;
    let mut variants = Vec::with_capacity(plan.coatings.len());
    for draw in &plan.coatings {
        let coat = draw.resolve(textures, mask.clone());
        let stack = render::render_coated(&plan.scene, &coat)?;
        let projected_albedo = project_albedo_sized(&coat.albedo, &coat.mask);
        variants.push(VariantData {
            draw: draw.clone(),
            stack,
            projected_albedo,
        });
    }
    Ok(SceneGroupData {
        scene_id: scene_id(plan.object_index, plan.viewpoint_index),
        cell_index: plan.cell_index,
        object_index: plan.object_index,
        viewpoint_index: plan.viewpoint_index,
        scene: plan.scene.clone(),
        original,
        mask,
        variants,
    })
}

/// Render one group from a live RNG: the original, a shared mask, and `k`
/// coated variants.
pub fn build_scene_group<T: Real>(
    scene: &SceneSpec<T>,
    rng: &mut Rng,
    k: usize,
    textures: &[ColorImage<T>],
    coverage: T,
    profile: &CoatProfile,
) -> Result<SceneGroupData<T>, DatasetError> {
    if k == 0 {
        return Err(DatasetError::NoVariants);
    }
    if textures.is_empty() {
        return Err(DatasetError::EmptyAlbedoPool);
    }
    let plan = GroupPlan {
        cell_index: 0,
        object_index: 0,
        viewpoint_index: 0,
        scene: scene.clone(),
        coverage,
        mask_salt: rng.next_u64(),
        coatings: (0..k)
            .map(|_| draw_coating(rng, textures.len(), profile))
            .collect(),
    };
    realize_group(&plan, textures)
}

// ---------------------------------------------------------------------------
// Training samples
// ---------------------------------------------------------------------------

/// The image-level view of a group that training needs.
#[derive(Clone, Debug)]
pub struct GroupImages<T> {
    pub original: ColorImage<T>,
    pub mask: ScalarMap<T>,
    pub variants: Vec<VariantImages<T>>,
}

#[derive(Clone, Debug)]
pub struct VariantImages<T> {
    pub image: ColorImage<T>,
    pub projected_albedo: ColorImage<T>,
    pub traits: TraitVector<T>,
    pub textured: bool,
}

impl<T: Real> SceneGroupData<T> {
    pub fn images(&self) -> GroupImages<T> {
        GroupImages {
            original: self.original.image.clone(),
            mask: self.mask.clone(),
            variants: self
                .variants
                .iter()
                .map(|v| VariantImages {
                    image: v.stack.image.clone(),
                    projected_albedo: v.projected_albedo.clone(),
                    traits: v.draw.traits,
                    textured: matches!(v.draw.albedo, AlbedoDraw::Texture(_)),
                })
                .collect(),
        }
    }
}

/// One supervised example for the flow trainer.
#[derive(Clone, Debug)]
pub struct TrainingSample<T> {
    pub task: TrainingTask,
    pub input: ColorImage<T>,
    pub target: ColorImage<T>,
    pub mask: ScalarMap<T>,
    /// All-black for the remove task.
    pub projected_albedo: ColorImage<T>,
    /// Absent for the remove task.
    pub traits: Option<TraitVector<T>>,
}

/// Assemble one training sample per the task rules:
/// add: original -> random variant; replace: variant i -> variant j != i
/// conditioned on the target's coating; remove: variant -> original with
/// no material conditioning.
pub fn build_training_sample<T: Real>(
    group: &GroupImages<T>,
    task: Task,
    rng: &mut Rng,
) -> Result<TrainingSample<T>, DatasetError> {
    if group.variants.is_empty() {
        return Err(DatasetError::NoVariants);
    }
    match task {
        Task::Add => {
            let v = &group.variants[rng.next_below(group.variants.len())];
            Ok(TrainingSample {
                task: if v.textured {
                    TrainingTask::AddTextured
                } else {
                    TrainingTask::AddUniform
                },
                input: group.original.clone(),
                target: v.image.clone(),
                mask: group.mask.clone(),
                projected_albedo: v.projected_albedo.clone(),
                traits: Some(v.traits),
            })
        }
        Task::Replace => {
            let n = group.variants.len();
            if n < 2 {
                return Err(DatasetError::InsufficientVariants(n));
            }
            let i = rng.next_below(n);
            let j0 = rng.next_below(n - 1);
            let j = if j0 >= i { j0 + 1 } else { j0 };
            let target = &group.variants[j];
            Ok(TrainingSample {
                task: TrainingTask::Replace,
                input: group.variants[i].image.clone(),
                target: target.image.clone(),
                mask: group.mask.clone(),
                projected_albedo: target.projected_albedo.clone(),
                traits: Some(target.traits),
            })
        }
        Task::Remove => {
            let v = &group.variants[rng.next_below(group.variants.len())];
            let (w, h) = (group.original.width(), group.original.height());
            Ok(TrainingSample {
                task: TrainingTask::Remove,
                input: v.image.clone(),
                target: group.original.clone(),
                mask: group.mask.clone(),
                projected_albedo: ColorImage::new(w, h),
                traits: None,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// On-disk generation
// ---------------------------------------------------------------------------

/// The (object, viewpoint) cells enumerated by a config.
pub fn cells(config: &DatasetConfig, catalog_objects: usize, catalog_views: usize) -> Vec<(usize, usize)> {
    let objects = config.object_count.min(catalog_objects).max(1);
    let views = config.viewpoint_count.min(catalog_views).max(1);
    let mut cells: Vec<(usize, usize)> = (0..objects)
        .flat_map(|o| (0..views).map(move |v| (o, v)))
        .collect();
    if let Some(limit) = config.group_limit {
        cells.truncate(limit.max(1));
    }
    cells
}

fn write_group<T: Real>(
    root: &Path,
    group: &SceneGroupData<T>,
    previews: bool,
) -> Result<GroupRecord, DatasetError> {
    let group_dir = root.join(&group.scene_id);
    std::fs::create_dir_all(&group_dir)?;
    let mask_bytes = render::write_scalar_map_f32(&group_dir, "mask", &group.mask)?;
    let mask_sha256 = sha256_hex(&mask_bytes);

    let original_dir = group_dir.join("original");
    group.original.save_dir(&original_dir)?;
    if previews {
        group
            .original
            .image
            .save_srgb_png(&original_dir.join("preview.png"))?;
    }

    let mut variants = Vec::with_capacity(group.variants.len());
    for (i, variant) in group.variants.iter().enumerate() {
        let rel = format!("{}/variant_{i}", group.scene_id);
        let dir = root.join(&rel);
        variant.stack.save_dir(&dir)?;
        let pa = variant.projected_albedo.to_planes();
        let pa: [Vec<f32>; 3] = pa.map(|p| p.into_iter().map(|v| v.as_f64() as f32).collect());
        render::write_channel_f32(
            &dir,
            "projected_albedo",
            variant.projected_albedo.width(),
            variant.projected_albedo.height(),
            &[&pa[0], &pa[1], &pa[2]],
        )?;
        if previews {
            variant
                .stack
                .image
                .save_srgb_png(&dir.join("preview.png"))?;
        }
        variants.push(VariantRecord {
            coating: variant.draw.to_record(),
            channels: ChannelPaths::for_dir(&rel),
            projected_albedo: format!("{rel}/projected_albedo.raw"),
        });
    }

    Ok(GroupRecord {
        scene_id: group.scene_id.clone(),
        cell_index: group.cell_index,
        object_index: group.object_index,
        viewpoint_index: group.viewpoint_index,
        mask_path: format!("{}/mask.raw", group.scene_id),
        mask_sha256,
        original: ChannelPaths::for_dir(&format!("{}/original", group.scene_id)),
        variants,
    })
}

/// Generate the full dataset under `root` and write `manifest.json`.
/// Deterministic for a fixed `master_seed`, regardless of thread count:
/// each group draws from its own counter stream and the manifest is
/// assembled in scene order.
pub fn generate<T: Real>(
    root: &Path,
    config: &DatasetConfig,
    master_seed: u64,
    previews: bool,
) -> Result<Manifest, DatasetError> {
    config.validate()?;
    let catalog = AssetCatalog::<T>::builtin();
    std::fs::create_dir_all(root)?;
    let cells = cells(config, catalog.objects.len(), catalog.viewpoints.len());
    let mut records: Vec<GroupRecord> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, (obj, view))| {
            let plan = plan_group(master_seed, idx as u64, *obj, *view, &catalog, config)?;
            let group = realize_group(&plan, &catalog.coat_textures)?;
            write_group(root, &group, previews)
        })
        .collect::<Result<_, _>>()?;
    records.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        master_seed,
        config: config.clone(),
        groups: records,
    };
    manifest.save(root)?;
    Ok(manifest)
}

/// Load the image-level data the trainer needs for one manifest group.
pub fn load_group_images<T: Real>(
    root: &Path,
    record: &GroupRecord,
) -> Result<GroupImages<T>, DatasetError> {
    let read_color = |rel: &str| -> Result<ColorImage<T>, DatasetError> {
        let full = root.join(rel);
        let dir = full.parent().expect("channel path has a parent");
        let name = full
            .file_stem()
            .and_then(|s| s.to_str())
            .expect("channel path has a stem");
        let (meta, planes) = read_channel_f32(dir, name)?;
        let planes: Vec<Vec<T>> = planes
            .into_iter()
            .map(|p| p.into_iter().map(|v| T::of(v as f64)).collect())
            .collect();
        let arr: [Vec<T>; 3] = planes.try_into().map_err(|_| {
            DatasetError::Render(RenderError::BadChannelFile {
                path: rel.to_string(),
                message: "expected 3 channels".into(),
            })
        })?;
        Ok(ColorImage::from_planes(meta.width, meta.height, &arr)?)
    };

    let mask_full = root.join(&record.mask_path);
    let mask_dir = mask_full.parent().expect("mask path has a parent");
    let mask = render::read_scalar_map_f32::<T>(mask_dir, "mask")?;
    let original = read_color(&record.original.image)?;
    let mut variants = Vec::with_capacity(record.variants.len());
    for v in &record.variants {
        let draw = CoatingDraw::<T>::from_record(&v.coating);
        variants.push(VariantImages {
            image: read_color(&v.channels.image)?,
            projected_albedo: read_color(&v.projected_albedo)?,
            traits: draw.traits,
            textured: matches!(draw.albedo, AlbedoDraw::Texture(_)),
        });
    }
    Ok(GroupImages {
        original,
        mask,
        variants,
    })
}
