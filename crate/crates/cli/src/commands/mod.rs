pub mod baseline;
pub mod coat;
pub mod eval;
pub mod gen;
pub mod gradcheck;
pub mod sample;
pub mod train;

use crate::CliError;

/// Parse an `r,g,b` triple in [0, 1].
pub fn parse_color(s: &str) -> Result<coatlab::Vec3<f32>, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "--color expects r,g,b (three comma-separated values), got `{s}`"
        )));
    }
    let mut out = [0.0f32; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        let v: f32 = p
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("--color component `{p}` is not a number")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::usage(format!(
                "--color component {v} outside [0, 1]"
            )));
        }
        *o = v;
    }
    Ok(coatlab::Vec3(out))
}

/// Validate a trait flag value.
pub fn check_trait(name: &str, value: f32) -> Result<f32, CliError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::usage(format!(
            "--{name} must be in [0, 1], got {value}"
        )));
    }
    Ok(value)
}
