use crate::{CliError, CliResult};
use clap::Args;
use coatlab::dataset::{generate, DatasetConfig};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Args)]
pub struct GenArgs {
    /// JSON dataset config; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for channel files and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Master seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap the number of scene groups.
    #[arg(long)]
    pub groups: Option<usize>,
    /// Override the number of coated variants per group.
    #[arg(long)]
    pub variants: Option<usize>,
    /// Override the square image side length.
    #[arg(long)]
    pub size: Option<usize>,
    /// Also write sRGB preview PNGs next to the channel files.
    #[arg(long, default_value_t = false)]
    pub previews: bool,
}

pub fn load_config(path: Option<&PathBuf>) -> Result<DatasetConfig, CliError> {
    match path {
        None => Ok(DatasetConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Runtime(anyhow::anyhow!("cannot read config {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

pub fn run(args: GenArgs) -> CliResult {
    let mut config = load_config(args.config.as_ref())?;
    if let Some(groups) = args.groups {
        if groups == 0 {
            return Err(CliError::usage("--groups must be at least 1"));
        }
        config.group_limit = Some(groups);
    }
    if let Some(variants) = args.variants {
        if variants == 0 {
            return Err(CliError::usage("--variants must be at least 1"));
        }
        config.variants_per_group = variants;
    }
    if let Some(size) = args.size {
        if size == 0 {
            return Err(CliError::usage("--size must be at least 1"));
        }
        config.image_width = size;
        config.image_height = size;
    }
    if let Err(e) = config.validate() {
        return Err(CliError::usage(e.to_string()));
    }
    let start = Instant::now();
    let manifest = generate::<f32>(&args.out, &config, args.seed, args.previews)?;
    let variants: usize = manifest.groups.iter().map(|g| g.variants.len()).sum();
    println!(
        "wrote {} scene groups ({} coated variants) to {} in {:.2?}",
        manifest.groups.len(),
        variants,
        args.out.display(),
        start.elapsed()
    );
    Ok(())
}
