//! Training loop: Adam on the flow-matching loss with linear warmup into a
//! cosine decay, fed by the add/replace/remove task mixture.

use super::model::{FlowModel, ModelDims};
use super::packing::{build_conditioning, pack, TokenSequence, Tokens};
use super::{embed, FlowError};
use crate::dataset::{build_training_sample, sample_task_mixture, GroupImages, TrainingSample};
use crate::num::Real;
use crate::raster::ColorImage;
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LrSchedule {
    Cosine,
    Constant,
}

/// Trainer configuration; JSON config files mirror these field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub warmup_steps: usize,
    pub schedule: LrSchedule,
    pub batch_size: usize,
    pub total_steps: usize,
    /// Side length of the square training images.
    pub image_size: usize,
    pub patch_size: usize,
    pub hidden_dim: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-4,
            warmup_steps: 300,
            schedule: LrSchedule::Cosine,
            batch_size: 16,
            total_steps: 500,
            image_size: 32,
            patch_size: 2,
            hidden_dim: 48,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn dims(&self) -> ModelDims {
        let pp = self.patch_size * self.patch_size;
        ModelDims {
            z_dim: 3 * pp,
            cond_dim: (3 + 3) * pp + pp,
            hidden: self.hidden_dim,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if self.image_size == 0 || self.patch_size == 0 || self.image_size % self.patch_size != 0 {
            return Err(FlowError::BadPatchSize {
                h: self.image_size,
                w: self.image_size,
                p: self.patch_size,
            });
        }
        if self.batch_size == 0 || self.hidden_dim == 0 || self.learning_rate <= 0.0 {
            return Err(FlowError::BadConfig(
                "batch_size, hidden_dim, and learning_rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Learning rate at 1-based `step`: linear ramp over the warmup, then
/// cosine decay to zero at `total_steps` (or flat for `Constant`).
pub fn lr_at(config: &TrainConfig, step: usize) -> f64 {
    let peak = config.learning_rate;
    if config.warmup_steps > 0 && step <= config.warmup_steps {
        return peak * step as f64 / config.warmup_steps as f64;
    }
    match config.schedule {
        LrSchedule::Constant => peak,
        LrSchedule::Cosine => {
            let total = config.total_steps.max(step);
            let span = (total - config.warmup_steps).max(1) as f64;
            let progress = (step - config.warmup_steps) as f64 / span;
            peak * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos())
        }
    }
}

struct Adam<T> {
    m: Vec<T>,
    v: Vec<T>,
    step: usize,
}

impl<T: Real> Adam<T> {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Adam {
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            step: 0,
        }
    }

    fn update(&mut self, params: &mut [T], grads: &[T], lr: f64) {
        self.step += 1;
        let b1 = T::of(Self::BETA1);
        let b2 = T::of(Self::BETA2);
        let correction1 = 1.0 - Self::BETA1.powi(self.step as i32);
        let correction2 = 1.0 - Self::BETA2.powi(self.step as i32);
        let rate = T::of(lr / correction1);
        let c2 = T::of(1.0 / correction2);
        let eps = T::of(Self::EPS);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = b1 * *m + (T::one() - b1) * *g;
            *v = b2 * *v + (T::one() - b2) * *g * *g;
            *p -= rate * *m / ((*v * c2).sqrt() + eps);
        }
    }
}

/// Tokenized view of one training sample.
pub struct PreparedSample<T> {
    pub x0: Tokens<T>,
    pub cond: TokenSequence<T>,
    pub trait_tokens_routes: Vec<embed::TokenRoute>,
}

fn image_planes<T: Real>(img: &ColorImage<T>) -> [Vec<T>; 3] {
    img.to_planes()
}

/// Pack a training sample into flow tokens and conditioning.
pub fn prepare_sample<T: Real>(
    sample: &TrainingSample<T>,
    p: usize,
) -> Result<PreparedSample<T>, FlowError> {
    let (w, h) = (sample.input.width(), sample.input.height());
    let input_planes = image_planes(&sample.input);
    let albedo_planes = image_planes(&sample.projected_albedo);
    let input_refs: Vec<&[T]> = input_planes.iter().map(|v| v.as_slice()).collect();
    let albedo_refs: Vec<&[T]> = albedo_planes.iter().map(|v| v.as_slice()).collect();
    let cond = build_conditioning(
        &input_refs,
        &albedo_refs,
        sample.mask.data(),
        h,
        w,
        h,
        w,
        p,
    )?;
    let target_planes = image_planes(&sample.target);
    let target_refs: Vec<&[T]> = target_planes.iter().map(|v| v.as_slice()).collect();
    let x0 = pack(&target_refs, h, w, p)?;
    let routes = embed::trait_token_routes(sample.traits.as_ref(), sample.task);
    Ok(PreparedSample {
        x0,
        cond,
        trait_tokens_routes: routes,
    })
}

pub fn gaussian_tokens<T: Real>(count: usize, dim: usize, rng: &mut Rng) -> Tokens<T> {
    let mut tokens = Tokens::zeros(count, dim);
    for v in tokens.data.iter_mut() {
        *v = T::of(rng.next_normal());
    }
    tokens
}

#[derive(Clone, Debug)]
pub struct TrainOutput<T> {
    pub model: FlowModel<T>,
    /// Per-step batch loss.
    pub losses: Vec<f64>,
    /// Trailing 50-step mean of the loss.
    pub smoothed: Vec<f64>,
    /// Learning rate actually used at each step.
    pub lrs: Vec<f64>,
}

pub const SMOOTH_WINDOW: usize = 50;

pub fn smoothed_curve(losses: &[f64]) -> Vec<f64> {
    losses
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let start = (i + 1).saturating_sub(SMOOTH_WINDOW);
            let window = &losses[start..=i];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect()
}

/// Ratio of the final smoothed loss to the first full-window smoothed loss.
pub fn loss_reduction_ratio(output: &TrainOutput<impl Real>) -> f64 {
    if output.smoothed.is_empty() {
        return 1.0;
    }
    let first = output.smoothed[SMOOTH_WINDOW.min(output.smoothed.len()) - 1];
    let last = *output.smoothed.last().unwrap();
    last / first
}

/// Train a model on scene groups. Deterministic given `config.seed`:
/// initialization uses stream 0, data and noise draws use stream 1.
pub fn train<T: Real>(
    groups: &[GroupImages<T>],
    config: &TrainConfig,
) -> Result<TrainOutput<T>, FlowError> {
    config.validate()?;
    if groups.is_empty() {
        return Err(FlowError::BadConfig("no training groups".into()));
    }
    for g in groups {
        if g.original.width() != config.image_size || g.original.height() != config.image_size {
            return Err(FlowError::ShapeMismatch(format!(
                "group images are {}x{}, config expects {}",
                g.original.width(),
                g.original.height(),
                config.image_size
            )));
        }
    }

    let dims = config.dims();
    let mut model = FlowModel::<T>::init(dims, &mut Rng::stream(config.seed, 0));
    let mut rng = Rng::stream(config.seed, 1);
    let mut adam = Adam::<T>::new(model.params.len());
    let mut grads = vec![T::zero(); model.params.len()];
    let mut losses = Vec::with_capacity(config.total_steps);
    let mut lrs = Vec::with_capacity(config.total_steps);

    for step in 1..=config.total_steps {
        let lr = lr_at(config, step);
        grads.iter_mut().for_each(|g| *g = T::zero());
        let weight = T::of(1.0 / config.batch_size as f64);
        let mut batch_loss = 0.0f64;
        for _ in 0..config.batch_size {
            let task = sample_task_mixture(&mut rng, 1)[0];
            let group = &groups[rng.next_below(groups.len())];
            let sample = build_training_sample(group, task, &mut rng)?;
            let prep = prepare_sample(&sample, config.patch_size)?;
            let trait_tokens: Vec<Vec<T>> = prep
                .trait_tokens_routes
                .iter()
                .map(|route| {
                    let tbl = model.table();
                    let mut out = vec![T::zero(); tbl.dim];
                    for (slot, coeff) in route {
                        let vecs = tbl.slot(*slot);
                        let c = T::of(*coeff);
                        for (o, v) in out.iter_mut().zip(vecs) {
                            *o += c * *v;
                        }
                    }
                    out
                })
                .collect();
            let t = T::of(rng.next_f64());
            let noise = gaussian_tokens(prep.x0.count, prep.x0.dim, &mut rng);
            let loss = model.cfm_loss_grad(
                &prep.x0,
                &noise,
                t,
                &prep.cond,
                &trait_tokens,
                &prep.trait_tokens_routes,
                &mut grads,
                weight,
            )?;
            batch_loss += loss.as_f64() / config.batch_size as f64;
        }
        if !batch_loss.is_finite() {
            return Err(FlowError::Divergence { step });
        }
        adam.update(&mut model.params, &grads, lr);
        if !model.params.iter().all(|p| p.is_finite()) {
            return Err(FlowError::Divergence { step });
        }
        losses.push(batch_loss);
        lrs.push(lr);
    }

    let smoothed = smoothed_curve(&losses);
    Ok(TrainOutput {
        model,
        losses,
        smoothed,
        lrs,
    })
}
