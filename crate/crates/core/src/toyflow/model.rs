//! The velocity predictor: a per-token affine embedding followed by two
//! tanh layers and a per-token output head. The mean of the trait/task
//! embedding tokens is added to every token's hidden state, giving global,
//! spatially uniform material control. The backward pass is written by
//! hand and verified against finite differences.

use super::embed::{TokenRoute, TraitEmbeddingTable, TABLE_SLOTS};
use super::packing::{TokenSequence, Tokens};
use super::FlowError;
use crate::num::Real;
use crate::rng::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    /// Per-token dimension of the flowing state (packed image channels).
    pub z_dim: usize,
    /// Per-token dimension of the conditioning sequence.
    pub cond_dim: usize,
    /// Hidden width; also the trait embedding dimension.
    pub hidden: usize,
}

impl ModelDims {
    pub fn input_dim(&self) -> usize {
        self.z_dim + self.cond_dim + 1 // + the time scalar
    }

    fn w0_len(&self) -> usize {
        self.hidden * self.input_dim()
    }
    fn w1_len(&self) -> usize {
        self.hidden * self.hidden
    }
    fn w3_len(&self) -> usize {
        self.z_dim * self.hidden
    }
    fn table_len(&self) -> usize {
        TABLE_SLOTS * self.hidden
    }

    /// Parameter offsets in declaration order:
    /// w0, b0, w1, b1, w2, b2, w3, b3, embedding table.
    pub fn offsets(&self) -> [usize; 10] {
        let mut off = [0usize; 10];
        let lens = [
            self.w0_len(),
            self.hidden,
            self.w1_len(),
            self.hidden,
            self.w1_len(),
            self.hidden,
            self.w3_len(),
            self.z_dim,
            self.table_len(),
        ];
        for (i, len) in lens.iter().enumerate() {
            off[i + 1] = off[i] + len;
        }
        off
    }

    pub fn param_count(&self) -> usize {
        self.offsets()[9]
    }
}

/// All trainable weights, stored flat in declaration order (see
/// [`ModelDims::offsets`]); the checkpoint blob uses the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowModel<T> {
    pub dims: ModelDims,
    pub params: Vec<T>,
}

/// Forward activations kept for the backward pass.
pub struct Cache<T> {
    n: usize,
    u: Vec<T>,
    h: Vec<T>,
    p: Vec<T>,
    q: Vec<T>,
    trait_count: usize,
}

fn matvec<T: Real>(w: &[T], rows: usize, cols: usize, x: &[T], out: &mut [T]) {
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let mut acc = T::zero();
        for (a, b) in row.iter().zip(x) {
            acc += *a * *b;
        }
        out[r] = acc;
    }
}

/// out += w^T * d (accumulate input gradient).
fn matvec_transpose_acc<T: Real>(w: &[T], rows: usize, cols: usize, d: &[T], out: &mut [T]) {
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let dr = d[r];
        for (o, a) in out.iter_mut().zip(row) {
            *o += *a * dr;
        }
    }
}

/// grad_w += d * x^T (outer product accumulate).
fn outer_acc<T: Real>(grad_w: &mut [T], rows: usize, cols: usize, d: &[T], x: &[T]) {
    for r in 0..rows {
        let row = &mut grad_w[r * cols..(r + 1) * cols];
        let dr = d[r];
        for (g, v) in row.iter_mut().zip(x) {
            *g += dr * *v;
        }
    }
}

impl<T: Real> FlowModel<T> {
    /// Uniform fan-in scaled initialization; embedding vectors start small.
    pub fn init(dims: ModelDims, rng: &mut Rng) -> Self {
        let off = dims.offsets();
        let mut params = vec![T::zero(); dims.param_count()];
        let mut fill = |range: std::ops::Range<usize>, scale: f64, rng: &mut Rng| {
            for v in &mut params[range] {
                *v = T::of(rng.range(-scale, scale));
            }
        };
        let s0 = (1.0 / dims.input_dim() as f64).sqrt();
        let s1 = (1.0 / dims.hidden as f64).sqrt();
        fill(off[0]..off[1], s0, rng);
        fill(off[2]..off[3], s1, rng);
        fill(off[4]..off[5], s1, rng);
        fill(off[6]..off[7], s1, rng);
        fill(off[8]..off[9], 0.02, rng);
        FlowModel { dims, params }
    }

    fn seg(&self, i: usize) -> &[T] {
        let off = self.dims.offsets();
        &self.params[off[i]..off[i + 1]]
    }

    pub fn table(&self) -> TraitEmbeddingTable<'_, T> {
        TraitEmbeddingTable::new(self.dims.hidden, self.seg(8))
    }

    fn check_shapes(&self, z: &Tokens<T>, cond: &TokenSequence<T>) -> Result<(), FlowError> {
        if z.dim != self.dims.z_dim {
            return Err(FlowError::ShapeMismatch(format!(
                "state tokens have dim {}, model expects {}",
                z.dim, self.dims.z_dim
            )));
        }
        if cond.tokens.dim != self.dims.cond_dim {
            return Err(FlowError::ShapeMismatch(format!(
                "conditioning tokens have dim {}, model expects {}",
                cond.tokens.dim, self.dims.cond_dim
            )));
        }
        if z.count != cond.tokens.count {
            return Err(FlowError::ShapeMismatch(format!(
                "{} state tokens vs {} conditioning tokens",
                z.count, cond.tokens.count
            )));
        }
        Ok(())
    }

    /// Predict the velocity for every token.
    pub fn forward(
        &self,
        z: &Tokens<T>,
        t: T,
        cond: &TokenSequence<T>,
        trait_tokens: &[Vec<T>],
    ) -> Result<(Tokens<T>, Cache<T>), FlowError> {
        self.check_shapes(z, cond)?;
        let d = &self.dims;
        let n = z.count;
        let (hid, idim) = (d.hidden, d.input_dim());
        let (w0, b0) = (self.seg(0), self.seg(1));
        let (w1, b1) = (self.seg(2), self.seg(3));
        let (w2, b2) = (self.seg(4), self.seg(5));
        let (w3, b3) = (self.seg(6), self.seg(7));

        // Global modulation: mean of the trait/task tokens.
        let mut g = vec![T::zero(); hid];
        if !trait_tokens.is_empty() {
            let inv = T::of(1.0 / trait_tokens.len() as f64);
            for tok in trait_tokens {
                for (gi, v) in g.iter_mut().zip(tok) {
                    *gi += *v * inv;
                }
            }
        }

        let mut u = vec![T::zero(); n * idim];
        let mut h = vec![T::zero(); n * hid];
        let mut p = vec![T::zero(); n * hid];
        let mut q = vec![T::zero(); n * hid];
        let mut v = Tokens::zeros(n, d.z_dim);
        let mut scratch = vec![T::zero(); hid];

        for i in 0..n {
            let ui = &mut u[i * idim..(i + 1) * idim];
            ui[..d.z_dim].copy_from_slice(z.row(i));
            ui[d.z_dim..d.z_dim + d.cond_dim].copy_from_slice(cond.tokens.row(i));
            ui[idim - 1] = t;

            let hi = &mut h[i * hid..(i + 1) * hid];
            matvec(w0, hid, idim, ui, hi);
            for (k, hv) in hi.iter_mut().enumerate() {
                *hv += b0[k] + g[k];
            }

            let pi = &mut p[i * hid..(i + 1) * hid];
            matvec(w1, hid, hid, hi, &mut scratch);
            for (k, pv) in pi.iter_mut().enumerate() {
                *pv = (scratch[k] + b1[k]).tanh();
            }

            let qi = &mut q[i * hid..(i + 1) * hid];
            matvec(w2, hid, hid, pi, &mut scratch);
            for (k, qv) in qi.iter_mut().enumerate() {
                *qv = (scratch[k] + b2[k]).tanh();
            }

            let vi = v.row_mut(i);
            matvec(w3, d.z_dim, hid, qi, vi);
            for (k, vv) in vi.iter_mut().enumerate() {
                *vv += b3[k];
            }
        }

        Ok((
            v,
            Cache {
                n,
                u,
                h,
                p,
                q,
                trait_count: trait_tokens.len(),
            },
        ))
    }

    /// Accumulate parameter gradients for upstream gradient `d_v` (per
    /// token, per output channel). `routes` mirrors the trait tokens the
    /// forward pass consumed.
    pub fn backward(
        &self,
        cache: &Cache<T>,
        d_v: &Tokens<T>,
        routes: &[TokenRoute],
        grads: &mut [T],
    ) {
        let d = &self.dims;
        let off = d.offsets();
        let (hid, idim) = (d.hidden, d.input_dim());
        let w1 = self.seg(2);
        let w2 = self.seg(4);
        let w3 = self.seg(6);

        let mut dg = vec![T::zero(); hid];
        let mut dq = vec![T::zero(); hid];
        let mut ds2 = vec![T::zero(); hid];
        let mut dp = vec![T::zero(); hid];
        let mut ds1 = vec![T::zero(); hid];
        let mut dh = vec![T::zero(); hid];

        for i in 0..cache.n {
            let dv = d_v.row(i);
            let (ui, hi, pi, qi) = (
                &cache.u[i * idim..(i + 1) * idim],
                &cache.h[i * hid..(i + 1) * hid],
                &cache.p[i * hid..(i + 1) * hid],
                &cache.q[i * hid..(i + 1) * hid],
            );

            // Output head.
            outer_acc(&mut grads[off[6]..off[7]], d.z_dim, hid, dv, qi);
            for (g, v) in grads[off[7]..off[8]].iter_mut().zip(dv) {
                *g += *v;
            }
            dq.iter_mut().for_each(|v| *v = T::zero());
            matvec_transpose_acc(w3, d.z_dim, hid, dv, &mut dq);

            // Second tanh layer.
            for k in 0..hid {
                ds2[k] = dq[k] * (T::one() - qi[k] * qi[k]);
            }
            outer_acc(&mut grads[off[4]..off[5]], hid, hid, &ds2, pi);
            for (g, v) in grads[off[5]..off[6]].iter_mut().zip(&ds2) {
                *g += *v;
            }
            dp.iter_mut().for_each(|v| *v = T::zero());
            matvec_transpose_acc(w2, hid, hid, &ds2, &mut dp);

            // First tanh layer.
            for k in 0..hid {
                ds1[k] = dp[k] * (T::one() - pi[k] * pi[k]);
            }
            outer_acc(&mut grads[off[2]..off[3]], hid, hid, &ds1, hi);
            for (g, v) in grads[off[3]..off[4]].iter_mut().zip(&ds1) {
                *g += *v;
            }
            dh.iter_mut().for_each(|v| *v = T::zero());
            matvec_transpose_acc(w1, hid, hid, &ds1, &mut dh);

            // Affine embedding and the shared global token.
            outer_acc(&mut grads[off[0]..off[1]], hid, idim, &dh, ui);
            for (g, v) in grads[off[1]..off[2]].iter_mut().zip(&dh) {
                *g += *v;
            }
            for (a, b) in dg.iter_mut().zip(&dh) {
                *a += *b;
            }
        }

        // Route the global-token gradient into the embedding table.
        if cache.trait_count > 0 {
            let inv = T::of(1.0 / cache.trait_count as f64);
            let table_grads = &mut grads[off[8]..off[9]];
            for route in routes {
                for (slot, coeff) in route {
                    let c = T::of(*coeff) * inv;
                    let seg = &mut table_grads[slot * hid..(slot + 1) * hid];
                    for (g, v) in seg.iter_mut().zip(&dg) {
                        *g += c * *v;
                    }
                }
            }
        }
    }
}

/// Anything that can drive the sampler.
pub trait Velocity<T: Real> {
    fn velocity(
        &self,
        z: &Tokens<T>,
        t: T,
        cond: &TokenSequence<T>,
        trait_tokens: &[Vec<T>],
    ) -> Tokens<T>;
}

impl<T: Real> Velocity<T> for FlowModel<T> {
    fn velocity(
        &self,
        z: &Tokens<T>,
        t: T,
        cond: &TokenSequence<T>,
        trait_tokens: &[Vec<T>],
    ) -> Tokens<T> {
        self.forward(z, t, cond, trait_tokens)
            .expect("shape-checked at construction")
            .0
    }
}

// ---------------------------------------------------------------------------
// Flow-matching loss
// ---------------------------------------------------------------------------

/// Straight-line interpolant `z_t = (1 - t) * noise + t * x0`, oriented so
/// the true velocity `dz/dt` is exactly `x0 - noise`.
pub fn interpolate<T: Real>(x0: &Tokens<T>, noise: &Tokens<T>, t: T) -> Tokens<T> {
    debug_assert_eq!(x0.count, noise.count);
    debug_assert_eq!(x0.dim, noise.dim);
    let mut z = Tokens::zeros(x0.count, x0.dim);
    for ((z, a), b) in z.data.iter_mut().zip(&x0.data).zip(&noise.data) {
        *z = (T::one() - t) * *b + t * *a;
    }
    z
}

/// Regression target of the flow matching loss: `x0 - noise`.
pub fn flow_target<T: Real>(x0: &Tokens<T>, noise: &Tokens<T>) -> Tokens<T> {
    let mut y = Tokens::zeros(x0.count, x0.dim);
    for ((y, a), b) in y.data.iter_mut().zip(&x0.data).zip(&noise.data) {
        *y = *a - *b;
    }
    y
}

/// Mean squared error between a velocity prediction and `x0 - noise` at
/// `z_t`, for any velocity implementation.
pub fn cfm_loss_with<T: Real, V: Velocity<T>>(
    velocity: &V,
    x0: &Tokens<T>,
    noise: &Tokens<T>,
    t: T,
    cond: &TokenSequence<T>,
    trait_tokens: &[Vec<T>],
) -> T {
    let z = interpolate(x0, noise, t);
    let v = velocity.velocity(&z, t, cond, trait_tokens);
    let y = flow_target(x0, noise);
    let mut acc = T::zero();
    for (a, b) in v.data.iter().zip(&y.data) {
        let d = *a - *b;
        acc += d * d;
    }
    acc / T::of(v.data.len() as f64)
}

impl<T: Real> FlowModel<T> {
    /// Loss value for one sample.
    pub fn cfm_loss(
        &self,
        x0: &Tokens<T>,
        noise: &Tokens<T>,
        t: T,
        cond: &TokenSequence<T>,
        trait_tokens: &[Vec<T>],
    ) -> Result<T, FlowError> {
        let z = interpolate(x0, noise, t);
        let (v, _) = self.forward(&z, t, cond, trait_tokens)?;
        let y = flow_target(x0, noise);
        let mut acc = T::zero();
        for (a, b) in v.data.iter().zip(&y.data) {
            let d = *a - *b;
            acc += d * d;
        }
        Ok(acc / T::of(v.data.len() as f64))
    }

    /// Loss plus parameter gradients, scaled by `weight` (callers batching
    /// several samples pass `1 / batch`).
    pub fn cfm_loss_grad(
        &self,
        x0: &Tokens<T>,
        noise: &Tokens<T>,
        t: T,
        cond: &TokenSequence<T>,
        trait_tokens: &[Vec<T>],
        routes: &[TokenRoute],
        grads: &mut [T],
        weight: T,
    ) -> Result<T, FlowError> {
        let z = interpolate(x0, noise, t);
        let (v, cache) = self.forward(&z, t, cond, trait_tokens)?;
        let y = flow_target(x0, noise);
        let count = T::of(v.data.len() as f64);
        let mut loss = T::zero();
        let mut d_v = Tokens::zeros(v.count, v.dim);
        for ((d, a), b) in d_v.data.iter_mut().zip(&v.data).zip(&y.data) {
            let diff = *a - *b;
            loss += diff * diff;
            *d = T::of(2.0) * diff / count * weight;
        }
        self.backward(&cache, &d_v, routes, grads);
        Ok(loss / count)
    }
}
