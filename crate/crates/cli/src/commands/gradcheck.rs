use crate::{CliError, CliResult};
use clap::Args;
use coatlab::toyflow::{grad_check, reference_model_and_instance};

#[derive(Args)]
pub struct GradcheckArgs {
    /// Maximum acceptable relative error.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}

pub fn run(args: GradcheckArgs) -> CliResult {
    let (mut model, instance) = reference_model_and_instance();
    let params = model.params.len();
    let err = grad_check(&mut model, &instance);
    println!(
        "gradient check over {params} parameters: max relative error {err:.3e} (tolerance {:.1e})",
        args.tolerance
    );
    if err < args.tolerance {
        Ok(())
    } else {
        Err(CliError::Runtime(anyhow::anyhow!(
            "gradient check failed: {err:.3e} >= {:.1e}",
            args.tolerance
        )))
    }
}
