use crate::{CliError, CliResult};
use clap::Args;
use coatlab::dataset::{load_group_images, GroupImages, Manifest};
use coatlab::toyflow::{save_checkpoint, train, TrainConfig};
use std::path::PathBuf;

#[derive(Args)]
pub struct TrainArgs {
    /// Dataset manifest to train on.
    #[arg(long)]
    pub manifest: PathBuf,
    /// JSON trainer config; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the number of training steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Override the trainer seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output checkpoint path.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Loss curve CSV (default: `<checkpoint>.loss.csv`).
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
}

pub fn load_train_config(path: Option<&PathBuf>) -> Result<TrainConfig, CliError> {
    match path {
        None => Ok(TrainConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Runtime(anyhow::anyhow!("cannot read config {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

pub fn load_groups(manifest_path: &PathBuf) -> Result<Vec<GroupImages<f64>>, CliError> {
    let manifest = Manifest::load(manifest_path)?;
    let root = manifest_path
        .parent()
        .ok_or_else(|| CliError::usage("--manifest has no parent directory"))?;
    let mut groups = Vec::with_capacity(manifest.groups.len());
    for record in &manifest.groups {
        groups.push(load_group_images::<f64>(root, record)?);
    }
    Ok(groups)
}

pub fn run(args: TrainArgs) -> CliResult {
    let mut config = load_train_config(args.config.as_ref())?;
    if let Some(steps) = args.steps {
        config.total_steps = steps;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let groups = load_groups(&args.manifest)?;
    if let Some(first) = groups.first() {
        if first.original.width() != config.image_size {
            return Err(CliError::usage(format!(
                "dataset images are {}px but the config trains at {}px; regenerate or adjust image_size",
                first.original.width(),
                config.image_size
            )));
        }
    }

    let start = std::time::Instant::now();
    let output = train(&groups, &config).map_err(anyhow::Error::from)?;
    save_checkpoint(&output.model, &config, &args.checkpoint)?;

    let loss_csv = args
        .loss_csv
        .clone()
        .unwrap_or_else(|| args.checkpoint.with_extension("loss.csv"));
    let mut csv = String::from("step,loss,smoothed,lr\n");
    for (i, loss) in output.losses.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            loss,
            output.smoothed[i],
            output.lrs[i]
        ));
    }
    std::fs::write(&loss_csv, csv)?;

    match (output.smoothed.first(), output.smoothed.last()) {
        (Some(first), Some(last)) => println!(
            "trained {} steps in {:.2?}; smoothed loss {first:.4} -> {last:.4}; checkpoint at {}",
            output.losses.len(),
            start.elapsed(),
            args.checkpoint.display()
        ),
        _ => println!(
            "wrote initial checkpoint (0 steps) to {}",
            args.checkpoint.display()
        ),
    }
    println!("loss curve at {}", loss_csv.display());
    Ok(())
}
