//! Finite-difference verification of the hand-written backward pass.

use super::embed::TokenRoute;
use super::model::FlowModel;
use super::packing::{TokenSequence, Tokens};
use super::train::gaussian_tokens;
use crate::coating::TraitVector;
use crate::dataset::TrainingTask;
use crate::rng::Rng;
use crate::toyflow::{build_conditioning, embed, ModelDims};

/// One fixed loss evaluation point for gradient checking.
pub struct CheckInstance {
    pub x0: Tokens<f64>,
    pub noise: Tokens<f64>,
    pub t: f64,
    pub cond: TokenSequence<f64>,
    pub traits: Option<TraitVector<f64>>,
    pub task: TrainingTask,
}

impl CheckInstance {
    pub fn routes(&self) -> Vec<TokenRoute> {
        embed::trait_token_routes(self.traits.as_ref(), self.task)
    }

    pub fn trait_tokens(&self, model: &FlowModel<f64>) -> Vec<Vec<f64>> {
        embed::embed_traits(self.traits.as_ref(), self.task, &model.table())
    }
}

/// Reference setup: a 4x4 image with patch 2 (4 tokens) and hidden width 8,
/// about 700 parameters in double precision.
pub fn reference_model_and_instance() -> (FlowModel<f64>, CheckInstance) {
    let dims = ModelDims {
        z_dim: 12,
        cond_dim: 28,
        hidden: 8,
    };
    let mut rng = Rng::new(0xfeed);
    let model = FlowModel::<f64>::init(dims, &mut rng);

    let plane = |rng: &mut Rng| -> Vec<f64> { (0..16).map(|_| rng.next_f64()).collect() };
    let input: Vec<Vec<f64>> = (0..3).map(|_| plane(&mut rng)).collect();
    let albedo: Vec<Vec<f64>> = (0..3).map(|_| plane(&mut rng)).collect();
    let mask: Vec<f64> = (0..16).map(|_| if rng.chance(0.6) { 1.0 } else { 0.0 }).collect();
    let input_refs: Vec<&[f64]> = input.iter().map(|p| p.as_slice()).collect();
    let albedo_refs: Vec<&[f64]> = albedo.iter().map(|p| p.as_slice()).collect();
    let cond = build_conditioning(&input_refs, &albedo_refs, &mask, 4, 4, 4, 4, 2)
        .expect("reference shapes are valid");

    let target: Vec<Vec<f64>> = (0..3).map(|_| plane(&mut rng)).collect();
    let target_refs: Vec<&[f64]> = target.iter().map(|p| p.as_slice()).collect();
    let x0 = super::packing::pack(&target_refs, 4, 4, 2).expect("reference shapes are valid");
    let noise = gaussian_tokens(4, 12, &mut rng);

    let instance = CheckInstance {
        x0,
        noise,
        t: 0.37,
        cond,
        traits: Some(TraitVector::new(0.62, 1.0, 0.0, 0.45).unwrap()),
        task: TrainingTask::AddUniform,
    };
    (model, instance)
}

fn loss_of(model: &FlowModel<f64>, inst: &CheckInstance) -> f64 {
    let trait_tokens = inst.trait_tokens(model);
    model
        .cfm_loss(&inst.x0, &inst.noise, inst.t, &inst.cond, &trait_tokens)
        .expect("instance matches the model")
}

/// Backpropagated gradients of the loss with respect to every parameter.
pub fn analytic_grads(model: &FlowModel<f64>, inst: &CheckInstance) -> Vec<f64> {
    let mut grads = vec![0.0; model.params.len()];
    let trait_tokens = inst.trait_tokens(model);
    model
        .cfm_loss_grad(
            &inst.x0,
            &inst.noise,
            inst.t,
            &inst.cond,
            &trait_tokens,
            &inst.routes(),
            &mut grads,
            1.0,
        )
        .expect("instance matches the model");
    grads
}

/// Central finite differences with step `h` for the listed parameters.
pub fn finite_diff_grads(
    model: &mut FlowModel<f64>,
    inst: &CheckInstance,
    indices: &[usize],
    h: f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(indices.len());
    for &i in indices {
        let original = model.params[i];
        model.params[i] = original + h;
        let plus = loss_of(model, inst);
        model.params[i] = original - h;
        let minus = loss_of(model, inst);
        model.params[i] = original;
        out.push((plus - minus) / (2.0 * h));
    }
    out
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Max relative error between analytic and central-difference gradients
/// over the listed parameters; an empty list compares nothing and returns 0.
pub fn grad_check_subset(
    model: &mut FlowModel<f64>,
    inst: &CheckInstance,
    indices: &[usize],
) -> f64 {
    if indices.is_empty() {
        return 0.0;
    }
    let analytic = analytic_grads(model, inst);
    let fd = finite_diff_grads(model, inst, indices, 1e-5);
    indices
        .iter()
        .zip(&fd)
        .map(|(&i, &numeric)| relative_error(analytic[i], numeric))
        .fold(0.0, f64::max)
}

/// Max relative error over every parameter of the model.
pub fn grad_check(model: &mut FlowModel<f64>, inst: &CheckInstance) -> f64 {
    let indices: Vec<usize> = (0..model.params.len()).collect();
    grad_check_subset(model, inst, &indices)
}
