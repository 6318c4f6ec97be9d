//! Patch packing: channel planes to per-token vectors and back, plus the
//! concatenated conditioning layout.

use super::FlowError;
use crate::num::Real;

/// A dense token matrix, `count` rows of `dim` values.
#[derive(Clone, Debug, PartialEq)]
pub struct Tokens<T> {
    pub data: Vec<T>,
    pub count: usize,
    pub dim: usize,
}

impl<T: Real> Tokens<T> {
    pub fn zeros(count: usize, dim: usize) -> Self {
        Tokens {
            data: vec![T::zero(); count * dim],
            count,
            dim,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Pack `C` channel planes of an `h x w` grid into `(h/p)(w/p)` tokens of
/// dimension `C p^2`. Tokens walk the patch grid in row-major order; inside
/// a token, values are laid out channel-major with each channel's `p x p`
/// block flattened row-major.
pub fn pack<T: Real>(planes: &[&[T]], h: usize, w: usize, p: usize) -> Result<Tokens<T>, FlowError> {
    if p == 0 || h % p != 0 || w % p != 0 {
        return Err(FlowError::BadPatchSize { h, w, p });
    }
    for plane in planes {
        if plane.len() != h * w {
            return Err(FlowError::ShapeMismatch(format!(
                "plane has {} values, expected {}",
                plane.len(),
                h * w
            )));
        }
    }
    let (bh, bw) = (h / p, w / p);
    let count = bh * bw;
    let dim = planes.len() * p * p;
    let mut tokens = Tokens::zeros(count, dim);
    for by in 0..bh {
        for bx in 0..bw {
            let token = by * bw + bx;
            let out = tokens.row_mut(token);
            let mut k = 0;
            for plane in planes {
                for dy in 0..p {
                    let y = by * p + dy;
                    for dx in 0..p {
                        let x = bx * p + dx;
                        out[k] = plane[y * w + x];
                        k += 1;
                    }
                }
            }
        }
    }
    Ok(tokens)
}

/// Inverse of [`pack`]; returns `channels` planes of `h x w`.
pub fn unpack<T: Real>(
    tokens: &Tokens<T>,
    channels: usize,
    h: usize,
    w: usize,
    p: usize,
) -> Result<Vec<Vec<T>>, FlowError> {
    if p == 0 || h % p != 0 || w % p != 0 {
        return Err(FlowError::BadPatchSize { h, w, p });
    }
    let (bh, bw) = (h / p, w / p);
    if tokens.count != bh * bw || tokens.dim != channels * p * p {
        return Err(FlowError::ShapeMismatch(format!(
            "tokens are {}x{}, expected {}x{}",
            tokens.count,
            tokens.dim,
            bh * bw,
            channels * p * p
        )));
    }
    let mut planes = vec![vec![T::zero(); h * w]; channels];
    for by in 0..bh {
        for bx in 0..bw {
            let row = tokens.row(by * bw + bx);
            let mut k = 0;
            for plane in planes.iter_mut() {
                for dy in 0..p {
                    let y = by * p + dy;
                    for dx in 0..p {
                        let x = bx * p + dx;
                        plane[y * w + x] = row[k];
                        k += 1;
                    }
                }
            }
        }
    }
    Ok(planes)
}

/// Space-to-depth: split one `fh x fw` plane into `f^2` planes of
/// `h x w = fh/f x fw/f`, so a full-resolution mask can ride along with
/// lower-resolution latents.
pub fn expand_plane<T: Real>(
    plane: &[T],
    fh: usize,
    fw: usize,
    factor: usize,
) -> Result<Vec<Vec<T>>, FlowError> {
    if factor == 0 || fh % factor != 0 || fw % factor != 0 || plane.len() != fh * fw {
        return Err(FlowError::ShapeMismatch(format!(
            "cannot expand {fh}x{fw} plane by factor {factor}"
        )));
    }
    let (h, w) = (fh / factor, fw / factor);
    let mut out = vec![vec![T::zero(); h * w]; factor * factor];
    for y in 0..h {
        for x in 0..w {
            for dy in 0..factor {
                for dx in 0..factor {
                    out[dy * factor + dx][y * w + x] = plane[(y * factor + dy) * fw + (x * factor + dx)];
                }
            }
        }
    }
    Ok(out)
}

/// Per-token channel budget of the conditioning sequence, in concatenation
/// order (input image slot, albedo, mask).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TokenLayout {
    pub image_dim: usize,
    pub albedo_dim: usize,
    pub mask_dim: usize,
}

impl TokenLayout {
    pub fn total(&self) -> usize {
        self.image_dim + self.albedo_dim + self.mask_dim
    }
}

/// Packed conditioning tokens with their layout metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenSequence<T> {
    pub tokens: Tokens<T>,
    pub layout: TokenLayout,
}

/// Concatenate packed input planes, packed albedo planes, and the packed
/// (space-to-depth expanded, when higher-resolution) mask along the token
/// dimension, in that fixed order. The mask's resolution must be an integer
/// multiple of the latent grid.
pub fn build_conditioning<T: Real>(
    input_planes: &[&[T]],
    albedo_planes: &[&[T]],
    mask_plane: &[T],
    h: usize,
    w: usize,
    mask_h: usize,
    mask_w: usize,
    p: usize,
) -> Result<TokenSequence<T>, FlowError> {
    if mask_h % h != 0 || mask_w % w != 0 || mask_h / h != mask_w / w {
        return Err(FlowError::ShapeMismatch(format!(
            "mask {mask_h}x{mask_w} is not an integer multiple of the {h}x{w} grid"
        )));
    }
    let factor = mask_h / h;
    let image = pack(input_planes, h, w, p)?;
    let albedo = pack(albedo_planes, h, w, p)?;
    let mask_planes = expand_plane(mask_plane, mask_h, mask_w, factor)?;
    let mask_refs: Vec<&[T]> = mask_planes.iter().map(|p| p.as_slice()).collect();
    let mask = pack(&mask_refs, h, w, p)?;

    let layout = TokenLayout {
        image_dim: image.dim,
        albedo_dim: albedo.dim,
        mask_dim: mask.dim,
    };
    let count = image.count;
    let dim = layout.total();
    let mut tokens = Tokens::zeros(count, dim);
    for i in 0..count {
        let row = tokens.row_mut(i);
        row[..image.dim].copy_from_slice(image.row(i));
        row[image.dim..image.dim + albedo.dim].copy_from_slice(albedo.row(i));
        row[image.dim + albedo.dim..].copy_from_slice(mask.row(i));
    }
    Ok(TokenSequence { tokens, layout })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn pack_shapes_follow_the_rule() {
        // 16 channels at 128x128 with p=2: 4096 tokens of 64.
        let plane = vec![0.0f32; 128 * 128];
        let planes: Vec<&[f32]> = (0..16).map(|_| plane.as_slice()).collect();
        let tokens = pack(&planes, 128, 128, 2).unwrap();
        assert_eq!(tokens.count, 4096);
        assert_eq!(tokens.dim, 64);

        // 3 channels at 32x32 with p=2: 256 tokens of 12.
        let plane = vec![0.0f32; 32 * 32];
        let planes: Vec<&[f32]> = (0..3).map(|_| plane.as_slice()).collect();
        let tokens = pack(&planes, 32, 32, 2).unwrap();
        assert_eq!(tokens.count, 256);
        assert_eq!(tokens.dim, 12);
    }

    #[test]
    fn pack_unpack_round_trip_is_bit_exact() {
        let mut rng = Rng::new(8);
        for (c, h, w, p) in [(3usize, 8usize, 12usize, 2usize), (5, 6, 6, 3), (1, 4, 4, 4)] {
            let planes: Vec<Vec<f64>> = (0..c)
                .map(|_| (0..h * w).map(|_| rng.next_f64()).collect())
                .collect();
            let refs: Vec<&[f64]> = planes.iter().map(|p| p.as_slice()).collect();
            let tokens = pack(&refs, h, w, p).unwrap();
            let back = unpack(&tokens, c, h, w, p).unwrap();
            assert_eq!(planes, back);
        }
    }

    #[test]
    fn pack_rejects_bad_divisibility() {
        let plane = vec![0.0f32; 9];
        assert!(pack(&[plane.as_slice()], 3, 3, 2).is_err());
    }

    #[test]
    fn toy_conditioning_dimension_is_28() {
        let img = vec![0.0f64; 32 * 32];
        let planes: Vec<&[f64]> = (0..3).map(|_| img.as_slice()).collect();
        let mask = vec![0.0f64; 32 * 32];
        let cond = build_conditioning(&planes, &planes, &mask, 32, 32, 32, 32, 2).unwrap();
        assert_eq!(cond.tokens.count, 256);
        assert_eq!(cond.tokens.dim, 28);
        assert_eq!(
            cond.layout,
            TokenLayout {
                image_dim: 12,
                albedo_dim: 12,
                mask_dim: 4
            }
        );
    }

    #[test]
    fn black_albedo_zeroes_the_albedo_slice() {
        let mut rng = Rng::new(4);
        let img: Vec<f64> = (0..64).map(|_| rng.next_f64()).collect();
        let planes: Vec<&[f64]> = (0..3).map(|_| img.as_slice()).collect();
        let black = vec![0.0f64; 64];
        let black_planes: Vec<&[f64]> = (0..3).map(|_| black.as_slice()).collect();
        let mask: Vec<f64> = (0..64).map(|_| rng.next_f64()).collect();
        let cond = build_conditioning(&planes, &black_planes, &mask, 8, 8, 8, 8, 2).unwrap();
        for i in 0..cond.tokens.count {
            let row = cond.tokens.row(i);
            assert!(row[cond.layout.image_dim..cond.layout.image_dim + cond.layout.albedo_dim]
                .iter()
                .all(|v| *v == 0.0));
        }
    }

    #[test]
    fn mask_expansion_reorders_without_loss() {
        let mut rng = Rng::new(5);
        let plane: Vec<f64> = (0..64).map(|_| rng.next_f64()).collect();
        let expanded = expand_plane(&plane, 8, 8, 2).unwrap();
        assert_eq!(expanded.len(), 4);
        // Every input value appears exactly once across the planes.
        let mut all: Vec<f64> = expanded.iter().flatten().copied().collect();
        let mut orig = plane.clone();
        all.sort_by(f64::total_cmp);
        orig.sort_by(f64::total_cmp);
        assert_eq!(all, orig);
    }
}
