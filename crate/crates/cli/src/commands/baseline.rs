use super::parse_color;
use crate::{CliError, CliResult};
use clap::Args;
use coatlab::baselines::{blend_if, color_blend, BlendIfThresholds};
use coatlab::coating::CoatAlbedo;
use coatlab::raster::{ColorImage, ScalarMap};
use coatlab::render::project_albedo_sized;
use std::path::PathBuf;

#[derive(Args)]
pub struct BaselineArgs {
    /// One of: blend_if, color_blend.
    #[arg(long)]
    pub method: String,
    /// Base image (PNG).
    #[arg(long)]
    pub input: PathBuf,
    /// Coat albedo texture (PNG); projected over the mask.
    #[arg(long, conflicts_with = "color")]
    pub albedo: Option<PathBuf>,
    /// Uniform coat color `r,g,b` in [0, 1].
    #[arg(long)]
    pub color: Option<String>,
    /// Mask (grayscale PNG, same size as the input).
    #[arg(long)]
    pub mask: PathBuf,
    /// Blend-if luminance thresholds `lo0,lo1,hi0,hi1`.
    #[arg(long, default_value = "0,0.25,0.75,1")]
    pub blend_if_thresholds: String,
    /// Output image (PNG).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_thresholds(s: &str) -> Result<BlendIfThresholds<f32>, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::usage(format!(
            "--blend-if-thresholds expects lo0,lo1,hi0,hi1, got `{s}`"
        )));
    }
    let mut vals = [0.0f32; 4];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p.trim().parse().map_err(|_| {
            CliError::usage(format!("--blend-if-thresholds value `{p}` is not a number"))
        })?;
    }
    BlendIfThresholds::new(vals[0], vals[1], vals[2], vals[3])
        .map_err(|e| CliError::usage(e.to_string()))
}

enum Method {
    BlendIf,
    ColorBlend,
}

pub fn run(args: BaselineArgs) -> CliResult {
    // Validate every flag before touching the filesystem.
    let method = match args.method.as_str() {
        "blend_if" => Method::BlendIf,
        "color_blend" => Method::ColorBlend,
        other => {
            return Err(CliError::usage(format!(
                "unknown --method `{other}`; valid methods: blend_if, color_blend"
            )))
        }
    };
    let thresholds = parse_thresholds(&args.blend_if_thresholds)?;
    if args.albedo.is_none() && args.color.is_none() {
        return Err(CliError::usage(
            "exactly one of --albedo or --color is required",
        ));
    }

    let base = ColorImage::<f32>::load_srgb_png(&args.input)?;
    let mask = ScalarMap::<f32>::load_gray_png(&args.mask)?;
    let albedo = match (&args.albedo, &args.color) {
        (Some(path), None) => CoatAlbedo::Texture(ColorImage::load_srgb_png(path)?),
        (None, Some(color)) => CoatAlbedo::Uniform(parse_color(color)?),
        _ => unreachable!("validated above"),
    };
    let coat_layer = project_albedo_sized(&albedo, &mask);

    let out = match method {
        Method::BlendIf => blend_if(&base, &coat_layer, &mask, thresholds)?,
        Method::ColorBlend => color_blend(&base, &coat_layer, &mask)?,
    };
    out.save_srgb_png(&args.out)?;
    println!("wrote {}", args.out.display());
    Ok(())
}
