//! Toy-scale conditional rectified-flow model: patch packing, the
//! concatenated image/albedo/mask conditioning layout, global trait and
//! task embeddings, a hand-differentiated velocity MLP, training with
//! warmup + cosine decay, Euler sampling, and checkpointing.
//!
//! There is no autoencoder at this scale: the "latent" is the raw pixel
//! plane, so the conditioning mechanics can be exercised end to end on a
//! laptop CPU.

mod checkpoint;
pub mod embed;
mod gradcheck;
mod model;
mod packing;
mod sample;
mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_VERSION};
pub use embed::{embed_traits, trait_token_routes, TraitEmbeddingTable, SLOT_NAMES, TABLE_SLOTS};
pub use gradcheck::{
    analytic_grads, finite_diff_grads, grad_check, grad_check_subset, reference_model_and_instance,
    CheckInstance,
};
pub use model::{
    cfm_loss_with, flow_target, interpolate, Cache, FlowModel, ModelDims, Velocity,
};
pub use packing::{build_conditioning, expand_plane, pack, unpack, TokenLayout, TokenSequence, Tokens};
pub use sample::{sample_image, sample_tokens};
pub use train::{
    gaussian_tokens, loss_reduction_ratio, lr_at, prepare_sample, smoothed_curve, train,
    LrSchedule, PreparedSample, TrainConfig, TrainOutput, SMOOTH_WINDOW,
};

use crate::dataset::DatasetError;

#[derive(Debug, thiserror::Error)]
pub enum FlowError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{h}x{w} grid is not divisible by patch size {p}")]
    BadPatchSize { h: usize, w: usize, p: usize },
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("training diverged at step {step} (non-finite loss)")]
    Divergence { step: usize },
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
