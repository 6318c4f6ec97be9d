//! Checkpoint format: a fixed magic, a format version, a JSON snapshot of
//! the training config and model dimensions, then the parameter blob as
//! little-endian 64-bit floats in declaration order.

use super::model::{FlowModel, ModelDims};
use super::train::TrainConfig;
use super::FlowError;
use crate::num::Real;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"CFM1";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    config: TrainConfig,
    dims: ModelDims,
}

pub fn save_checkpoint<T: Real>(
    model: &FlowModel<T>,
    config: &TrainConfig,
    path: &Path,
) -> Result<(), FlowError> {
    let header = Header {
        config: config.clone(),
        dims: model.dims,
    };
    let json = serde_json::to_vec(&header).map_err(|e| FlowError::Checkpoint(e.to_string()))?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(MAGIC)?;
    file.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    file.write_all(&(json.len() as u32).to_le_bytes())?;
    file.write_all(&json)?;
    file.write_all(&(model.params.len() as u64).to_le_bytes())?;
    let mut blob = Vec::with_capacity(model.params.len() * 8);
    for v in &model.params {
        blob.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    file.write_all(&blob)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(FlowModel<f64>, TrainConfig), FlowError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |msg: &str| FlowError::Checkpoint(format!("{}: {msg}", path.display()));
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(bad("not a checkpoint file"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let json_len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if bytes.len() < 12 + json_len + 8 {
        return Err(bad("truncated header"));
    }
    let header: Header = serde_json::from_slice(&bytes[12..12 + json_len])
        .map_err(|e| bad(&format!("bad header json: {e}")))?;
    let count_off = 12 + json_len;
    let count = u64::from_le_bytes(bytes[count_off..count_off + 8].try_into().unwrap()) as usize;
    if count != header.dims.param_count() {
        return Err(bad(&format!(
            "parameter count {count} does not match dims {:?}",
            header.dims
        )));
    }
    let blob = &bytes[count_off + 8..];
    if blob.len() != count * 8 {
        return Err(bad("truncated parameter blob"));
    }
    let params = blob
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((
        FlowModel {
            dims: header.dims,
            params,
        },
        header.config,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let config = TrainConfig::default();
        let model = FlowModel::<f64>::init(config.dims(), &mut Rng::new(3));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&model, &config, &path).unwrap();
        let (loaded, loaded_config) = load_checkpoint(&path).unwrap();
        assert_eq!(loaded_config, config);
        assert_eq!(loaded.dims, model.dims);
        for (a, b) in loaded.params.iter().zip(&model.params) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.ckpt");
        std::fs::write(&path, b"not a checkpoint").unwrap();
        assert!(load_checkpoint(&path).is_err());
    }
}
