//! Dataset manifest: one JSON object listing every scene group, all channel
//! file paths (relative to the dataset root), coating parameters, and the
//! SHA-256 of the shared mask bytes.

use super::DatasetConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("referenced file missing: {0}")]
    MissingFile(PathBuf),
    #[error("mask hash mismatch for group {scene_id}: recorded {recorded}, computed {computed}")]
    MaskHashMismatch {
        scene_id: String,
        recorded: String,
        computed: String,
    },
    #[error("unsupported manifest version {0}")]
    BadVersion(u32),
}

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelPaths {
    pub image: String,
    pub albedo: String,
    pub normals: String,
    pub depth: String,
    pub shading: String,
    pub residual: String,
    pub object_mask: String,
}

impl ChannelPaths {
    pub fn for_dir(dir: &str) -> Self {
        ChannelPaths {
            image: format!("{dir}/image.raw"),
            albedo: format!("{dir}/albedo.raw"),
            normals: format!("{dir}/normals.raw"),
            depth: format!("{dir}/depth.raw"),
            shading: format!("{dir}/shading.raw"),
            residual: format!("{dir}/residual.raw"),
            object_mask: format!("{dir}/object_mask.raw"),
        }
    }

    pub fn all(&self) -> [&str; 7] {
        [
            &self.image,
            &self.albedo,
            &self.normals,
            &self.depth,
            &self.shading,
            &self.residual,
            &self.object_mask,
        ]
    }

    /// Directory holding this channel set, derived from the image path.
    pub fn dir(&self) -> &str {
        self.image.rsplit_once('/').map(|(d, _)| d).unwrap_or("")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AlbedoRecord {
    Uniform { rgb: [f64; 3] },
    Texture { index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoatingRecord {
    pub roughness: f64,
    pub metalness: f64,
    pub transmission: f64,
    pub thickness: f64,
    pub albedo: AlbedoRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantRecord {
    pub coating: CoatingRecord,
    pub channels: ChannelPaths,
    pub projected_albedo: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub scene_id: String,
    pub cell_index: u64,
    pub object_index: usize,
    pub viewpoint_index: usize,
    pub mask_path: String,
    pub mask_sha256: String,
    pub original: ChannelPaths,
    pub variants: Vec<VariantRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub master_seed: u64,
    pub config: DatasetConfig,
    pub groups: Vec<GroupRecord>,
}

impl Manifest {
    pub fn save(&self, root: &Path) -> Result<PathBuf, ManifestError> {
        let path = root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        if manifest.version != MANIFEST_VERSION {
            return Err(ManifestError::BadVersion(manifest.version));
        }
        Ok(manifest)
    }

    /// Checks that every referenced file exists under `root` and that each
    /// group's mask bytes still hash to the recorded digest.
    pub fn validate(&self, root: &Path) -> Result<(), ManifestError> {
        for group in &self.groups {
            let mut paths: Vec<&str> = vec![&group.mask_path];
            paths.extend(group.original.all());
            for variant in &group.variants {
                paths.extend(variant.channels.all());
                paths.push(&variant.projected_albedo);
            }
            for rel in paths {
                let p = root.join(rel);
                if !p.is_file() {
                    return Err(ManifestError::MissingFile(p));
                }
            }
            let bytes = std::fs::read(root.join(&group.mask_path))?;
            let computed = sha256_hex(&bytes);
            if computed != group.mask_sha256 {
                return Err(ManifestError::MaskHashMismatch {
                    scene_id: group.scene_id.clone(),
                    recorded: group.mask_sha256.clone(),
                    computed,
                });
            }
        }
        Ok(())
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        // SHA-256 of the empty string.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_round_trip_is_structurally_equal() {
        let manifest = Manifest {
            version: MANIFEST_VERSION,
            master_seed: 7,
            config: DatasetConfig::default(),
            groups: vec![GroupRecord {
                scene_id: "scene_00_00".into(),
                cell_index: 0,
                object_index: 0,
                viewpoint_index: 0,
                mask_path: "scene_00_00/mask.raw".into(),
                mask_sha256: "00".into(),
                original: ChannelPaths::for_dir("scene_00_00/original"),
                variants: vec![VariantRecord {
                    coating: CoatingRecord {
                        roughness: 0.5,
                        metalness: 1.0,
                        transmission: 0.0,
                        thickness: 0.25,
                        albedo: AlbedoRecord::Uniform {
                            rgb: [0.1, 0.2, 0.3],
                        },
                    },
                    channels: ChannelPaths::for_dir("scene_00_00/variant_0"),
                    projected_albedo: "scene_00_00/variant_0/projected_albedo.raw".into(),
                }],
            }],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = manifest.save(dir.path()).unwrap();
        let loaded = Manifest::load(&path).unwrap();
        assert_eq!(manifest, loaded);
    }
}
