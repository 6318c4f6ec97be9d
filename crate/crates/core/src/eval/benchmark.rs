//! Benchmark runner: score methods against a generated dataset.
//!
//! The oracle re-renders each variant by replaying the group's sampling
//! plan, so with a correct pipeline it reproduces the stored ground truth
//! bit-for-bit and lands on the PSNR cap.

use super::{evaluate_sample, EvalError, MethodResult, Prediction};
use crate::baselines::{blend_if, color_blend, BaselineError, BlendIfThresholds};
use crate::dataset::{
    load_group_images, plan_group, AssetCatalog, CoatingDraw, DatasetError, Manifest,
    ManifestError, TrainingTask,
};
use crate::raster::ColorImage;
use crate::render::{render_coated, ChannelStack, RenderError};
use crate::rng::Rng;
use crate::toyflow::{
    build_conditioning, embed_traits, load_checkpoint, sample_image, FlowError, FlowModel,
};
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum BenchmarkError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodSpec {
    /// Re-render with the ground-truth coating parameters.
    Oracle,
    /// Return the uncoated input unchanged.
    Identity,
    BlendIf,
    ColorBlend,
    /// Sample the trained toy flow model.
    Toy,
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Oracle => "oracle",
            MethodSpec::Identity => "identity",
            MethodSpec::BlendIf => "blend_if",
            MethodSpec::ColorBlend => "color_blend",
            MethodSpec::Toy => "toy",
        }
    }
}

impl FromStr for MethodSpec {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(MethodSpec::Oracle),
            "identity" => Ok(MethodSpec::Identity),
            "blend_if" => Ok(MethodSpec::BlendIf),
            "color_blend" => Ok(MethodSpec::ColorBlend),
            "toy" => Ok(MethodSpec::Toy),
            other => Err(EvalError::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchmarkOptions {
    pub blend_if_thresholds: BlendIfThresholds<f32>,
    pub toy_checkpoint: Option<PathBuf>,
    pub toy_steps: usize,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            blend_if_thresholds: BlendIfThresholds::default(),
            toy_checkpoint: None,
            toy_steps: 16,
        }
    }
}

const TOY_SAMPLER_SALT: u64 = 0x70f1_0a11;

fn toy_predict(
    model: &FlowModel<f64>,
    patch: usize,
    steps: usize,
    input: &ColorImage<f32>,
    albedo: &ColorImage<f32>,
    mask: &crate::raster::ScalarMap<f32>,
    traits: crate::coating::TraitVector<f64>,
    task: TrainingTask,
    rng: &mut Rng,
) -> Result<ColorImage<f32>, BenchmarkError> {
    let input64 = input.cast::<f64>();
    let albedo64 = albedo.cast::<f64>();
    let mask64 = mask.cast::<f64>();
    let (w, h) = (input64.width(), input64.height());
    let input_planes = input64.to_planes();
    let albedo_planes = albedo64.to_planes();
    let input_refs: Vec<&[f64]> = input_planes.iter().map(|p| p.as_slice()).collect();
    let albedo_refs: Vec<&[f64]> = albedo_planes.iter().map(|p| p.as_slice()).collect();
    let cond = build_conditioning(&input_refs, &albedo_refs, mask64.data(), h, w, h, w, patch)?;
    let trait_tokens = embed_traits(Some(&traits), task, &model.table());
    let out = sample_image(model, &cond, &trait_tokens, steps, rng, h, w, patch)?;
    Ok(out.cast::<f32>())
}

/// Run every requested method over all variants of every group in the
/// manifest and return one result per method (in the requested order).
pub fn run_benchmark(
    manifest: &Manifest,
    root: &Path,
    methods: &[MethodSpec],
    options: &BenchmarkOptions,
) -> Result<Vec<MethodResult>, BenchmarkError> {
    let catalog = AssetCatalog::<f32>::builtin();
    let toy_model = match (
        methods.contains(&MethodSpec::Toy),
        options.toy_checkpoint.as_ref(),
    ) {
        (true, Some(path)) => Some(load_checkpoint(path)?),
        (true, None) => return Err(EvalError::MissingCheckpoint.into()),
        _ => None,
    };

    let mut per_method: Vec<MethodResult> = methods
        .iter()
        .map(|m| MethodResult {
            method: m.name().to_string(),
            samples: Vec::new(),
        })
        .collect();

    for group in &manifest.groups {
        let images = load_group_images::<f32>(root, group)?;
        let needs_oracle = methods.contains(&MethodSpec::Oracle);
        let plan = if needs_oracle {
            Some(plan_group(
                manifest.master_seed,
                group.cell_index,
                group.object_index,
                group.viewpoint_index,
                &catalog,
                &manifest.config,
            )?)
        } else {
            None
        };

        for (vi, variant) in group.variants.iter().enumerate() {
            let gt = ChannelStack::<f32>::load_dir(&root.join(variant.channels.dir()))?;
            let projected = &images.variants[vi].projected_albedo;
            for (mi, method) in methods.iter().enumerate() {
                let scores = match method {
                    MethodSpec::Oracle => {
                        let plan = plan.as_ref().expect("oracle plan prepared");
                        let draw = CoatingDraw::<f32>::from_record(&variant.coating);
                        let coat = draw.resolve(&catalog.coat_textures, images.mask.clone());
                        let stack = render_coated(&plan.scene, &coat)?;
                        evaluate_sample(&Prediction::Stack(stack), &gt)?
                    }
                    MethodSpec::Identity => {
                        evaluate_sample(&Prediction::Rgb(images.original.clone()), &gt)?
                    }
                    MethodSpec::BlendIf => {
                        let out = blend_if(
                            &images.original,
                            projected,
                            &images.mask,
                            options.blend_if_thresholds,
                        )?;
                        evaluate_sample(&Prediction::Rgb(out), &gt)?
                    }
                    MethodSpec::ColorBlend => {
                        let out = color_blend(&images.original, projected, &images.mask)?;
                        evaluate_sample(&Prediction::Rgb(out), &gt)?
                    }
                    MethodSpec::Toy => {
                        let (model, config) = toy_model.as_ref().expect("checkpoint loaded");
                        let draw = CoatingDraw::<f64>::from_record(&variant.coating);
                        let task = if images.variants[vi].textured {
                            TrainingTask::AddTextured
                        } else {
                            TrainingTask::AddUniform
                        };
                        let mut rng = Rng::stream(
                            manifest.master_seed ^ TOY_SAMPLER_SALT,
                            group.cell_index * 4096 + vi as u64,
                        );
                        let out = toy_predict(
                            model,
                            config.patch_size,
                            options.toy_steps,
                            &images.original,
                            projected,
                            &images.mask,
                            draw.traits,
                            task,
                            &mut rng,
                        )?;
                        evaluate_sample(&Prediction::Rgb(out), &gt)?
                    }
                };
                per_method[mi].samples.push(scores);
            }
        }
    }
    Ok(per_method)
}
