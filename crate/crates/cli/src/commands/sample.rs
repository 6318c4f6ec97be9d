use crate::{CliError, CliResult};
use clap::Args;
use coatlab::dataset::{load_group_images, Manifest, Task, TrainingTask};
use coatlab::raster::ColorImage;
use coatlab::rng::Rng;
use coatlab::toyflow::{build_conditioning, embed_traits, load_checkpoint, sample_image};
use std::path::PathBuf;

#[derive(Args)]
pub struct SampleArgs {
    /// Trained checkpoint.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Dataset manifest supplying the conditioning images.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Scene group index.
    #[arg(long, default_value_t = 0)]
    pub group: usize,
    /// Coated variant index inside the group.
    #[arg(long, default_value_t = 0)]
    pub variant: usize,
    /// Editing task: add, replace, or remove.
    #[arg(long, default_value = "add")]
    pub task: String,
    /// Euler integration steps.
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output image (PNG).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: SampleArgs) -> CliResult {
    if args.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    let task = match args.task.as_str() {
        "add" => Task::Add,
        "replace" => Task::Replace,
        "remove" => Task::Remove,
        other => {
            return Err(CliError::usage(format!(
                "unknown --task `{other}`; valid tasks: add, replace, remove"
            )))
        }
    };
    let (model, config) = load_checkpoint(&args.checkpoint)?;
    let manifest = Manifest::load(&args.manifest)?;
    let root = args
        .manifest
        .parent()
        .ok_or_else(|| CliError::usage("--manifest has no parent directory"))?;
    let record = manifest.groups.get(args.group).ok_or_else(|| {
        CliError::usage(format!(
            "--group {} out of range; manifest has {} groups",
            args.group,
            manifest.groups.len()
        ))
    })?;
    let group = load_group_images::<f64>(root, record)?;
    let variant = group.variants.get(args.variant).ok_or_else(|| {
        CliError::usage(format!(
            "--variant {} out of range; group has {} variants",
            args.variant,
            group.variants.len()
        ))
    })?;

    // Conditioning mirrors training-sample construction for the task.
    let (input, albedo, traits, training_task) = match task {
        Task::Add => (
            &group.original,
            variant.projected_albedo.clone(),
            Some(variant.traits),
            if variant.textured {
                TrainingTask::AddTextured
            } else {
                TrainingTask::AddUniform
            },
        ),
        Task::Replace => {
            let other = (args.variant + 1) % group.variants.len();
            if other == args.variant {
                return Err(CliError::usage(
                    "replace needs at least 2 variants in the group",
                ));
            }
            (
                &group.variants[other].image,
                variant.projected_albedo.clone(),
                Some(variant.traits),
                TrainingTask::Replace,
            )
        }
        Task::Remove => (
            &variant.image,
            ColorImage::new(group.original.width(), group.original.height()),
            None,
            TrainingTask::Remove,
        ),
    };

    let (w, h) = (input.width(), input.height());
    let input_planes = input.to_planes();
    let albedo_planes = albedo.to_planes();
    let input_refs: Vec<&[f64]> = input_planes.iter().map(|p| p.as_slice()).collect();
    let albedo_refs: Vec<&[f64]> = albedo_planes.iter().map(|p| p.as_slice()).collect();
    let cond = build_conditioning(
        &input_refs,
        &albedo_refs,
        group.mask.data(),
        h,
        w,
        h,
        w,
        config.patch_size,
    )
    .map_err(anyhow::Error::from)?;
    let trait_tokens = embed_traits(traits.as_ref(), training_task, &model.table());
    let mut rng = Rng::new(args.seed);
    let image = sample_image(
        &model,
        &cond,
        &trait_tokens,
        args.steps,
        &mut rng,
        h,
        w,
        config.patch_size,
    )
    .map_err(anyhow::Error::from)?;
    image.save_srgb_png(&args.out)?;
    println!("sampled {}x{} image to {}", w, h, args.out.display());
    Ok(())
}
