use super::{check_trait, parse_color};
use crate::scene_file::load_scene;
use crate::{CliError, CliResult};
use clap::Args;
use coatlab::coating::{CoatAlbedo, CoatingSpec, TraitVector};
use coatlab::raster::{ColorImage, ScalarMap};
use coatlab::render::{project_albedo, render_coated};
use std::path::PathBuf;

#[derive(Args)]
pub struct CoatArgs {
    /// Scene description (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    /// Coat albedo texture (PNG, screen-aligned).
    #[arg(long, conflicts_with = "color")]
    pub albedo: Option<PathBuf>,
    /// Uniform coat albedo as `r,g,b` in [0, 1].
    #[arg(long)]
    pub color: Option<String>,
    /// Coat mask (grayscale PNG at the camera resolution).
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub roughness: f32,
    #[arg(long, default_value_t = 0.0)]
    pub metalness: f32,
    #[arg(long, default_value_t = 0.0)]
    pub transmission: f32,
    #[arg(long, default_value_t = 0.5)]
    pub thickness: f32,
    /// Output directory for channel files, the preview, and the projected
    /// albedo.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: CoatArgs) -> CliResult {
    let roughness = check_trait("roughness", args.roughness)?;
    let metalness = check_trait("metalness", args.metalness)?;
    let transmission = check_trait("transmission", args.transmission)?;
    let thickness = check_trait("thickness", args.thickness)?;
    let traits = TraitVector::new(roughness, metalness, transmission, thickness)
        .map_err(|e| CliError::usage(e.to_string()))?;

    let scene = load_scene(&args.scene)?;
    let mask = ScalarMap::<f32>::load_gray_png(&args.mask)?;
    let albedo = match (&args.albedo, &args.color) {
        (Some(path), None) => CoatAlbedo::Texture(ColorImage::load_srgb_png(path)?),
        (None, Some(color)) => CoatAlbedo::Uniform(parse_color(color)?),
        _ => {
            return Err(CliError::usage(
                "exactly one of --albedo or --color is required",
            ))
        }
    };
    let coat =
        CoatingSpec::new(traits, albedo, mask).map_err(|e| CliError::usage(e.to_string()))?;

    let stack = render_coated(&scene, &coat)?;
    std::fs::create_dir_all(&args.out)?;
    stack.save_dir(&args.out)?;
    stack.image.save_srgb_png(&args.out.join("preview.png"))?;
    let projected = project_albedo(&coat, &stack)?;
    projected.save_srgb_png(&args.out.join("projected_albedo.png"))?;
    println!(
        "rendered {}x{} coated scene to {}",
        stack.width(),
        stack.height(),
        args.out.display()
    );
    Ok(())
}
