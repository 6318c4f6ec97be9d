use super::baseline::parse_thresholds;
use crate::{CliError, CliResult};
use clap::Args;
use coatlab::dataset::Manifest;
use coatlab::eval::{aggregate_report, run_benchmark, BenchmarkOptions, MethodSpec};
use std::path::PathBuf;

#[derive(Args)]
pub struct EvalArgs {
    /// Path to a dataset manifest.json.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated methods: oracle, identity, blend_if, color_blend, toy.
    #[arg(long)]
    pub methods: String,
    /// Trained checkpoint (required for the toy method).
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Sampler steps for the toy method.
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
    #[arg(long, default_value = "0,0.25,0.75,1")]
    pub blend_if_thresholds: String,
    /// Report CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: EvalArgs) -> CliResult {
    let methods: Vec<MethodSpec> = args
        .methods
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<MethodSpec>()
                .map_err(|e| CliError::usage(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    if methods.is_empty() {
        return Err(CliError::usage(
            "--methods must list at least one of: oracle, identity, blend_if, color_blend, toy",
        ));
    }
    if methods.contains(&MethodSpec::Toy) && args.checkpoint.is_none() {
        return Err(CliError::usage("method `toy` needs --checkpoint"));
    }

    let manifest = Manifest::load(&args.manifest)?;
    let root = args
        .manifest
        .parent()
        .ok_or_else(|| CliError::usage("--manifest has no parent directory"))?
        .to_path_buf();
    manifest.validate(&root)?;

    let options = BenchmarkOptions {
        blend_if_thresholds: parse_thresholds(&args.blend_if_thresholds)?,
        toy_checkpoint: args.checkpoint.clone(),
        toy_steps: args.steps,
    };
    let results = run_benchmark(&manifest, &root, &methods, &options)?;
    let report = aggregate_report(&results)?;
    std::fs::write(&args.out, report.to_csv())?;
    print!("{}", report.to_text());
    println!("report written to {}", args.out.display());
    Ok(())
}
