//! Pixel buffers: interleaved-RGB color images, single-channel scalar maps,
//! and per-pixel 3-vector maps for normals.

use crate::color::{linear_to_srgb8, srgb8_to_linear};
use crate::num::Real;
use crate::vec3::Vec3;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("data length {got} does not match {expect} for {width}x{height}")]
    BadLength {
        width: usize,
        height: usize,
        expect: usize,
        got: usize,
    },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("mask value {value} at index {index} outside [0, 1]")]
    MaskOutOfRange { index: usize, value: f64 },
    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
}

/// Linear-radiance RGB image, row-major interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorImage<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> ColorImage<T> {
    pub fn new(width: usize, height: usize) -> Self {
        ColorImage {
            width,
            height,
            data: vec![T::zero(); width * height * 3],
        }
    }

    pub fn splat(width: usize, height: usize, c: Vec3<T>) -> Self {
        let mut img = Self::new(width, height);
        for px in img.data.chunks_exact_mut(3) {
            px.copy_from_slice(&c.0);
        }
        img
    }

    /// Validates length and finiteness. Radiance channels are additionally
    /// non-negative by construction in the renderer; the residual channel
    /// legitimately stores negative values, so the container permits them.
    pub fn from_data(width: usize, height: usize, data: Vec<T>) -> Result<Self, RasterError> {
        let expect = width * height * 3;
        if data.len() != expect {
            return Err(RasterError::BadLength {
                width,
                height,
                expect,
                got: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(RasterError::NonFinite { index });
        }
        Ok(ColorImage {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }
    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }
    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }
    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Vec3<T> {
        let i = (y * self.width + x) * 3;
        Vec3([self.data[i], self.data[i + 1], self.data[i + 2]])
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: Vec3<T>) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&c.0);
    }

    pub fn pixels(&self) -> impl Iterator<Item = Vec3<T>> + '_ {
        self.data.chunks_exact(3).map(|p| Vec3([p[0], p[1], p[2]]))
    }

    pub fn is_non_negative(&self) -> bool {
        self.data.iter().all(|v| *v >= T::zero())
    }

    /// Split into three planar channels (R, G, B).
    pub fn to_planes(&self) -> [Vec<T>; 3] {
        let n = self.width * self.height;
        let mut planes = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for px in self.data.chunks_exact(3) {
            planes[0].push(px[0]);
            planes[1].push(px[1]);
            planes[2].push(px[2]);
        }
        planes
    }

    pub fn from_planes(
        width: usize,
        height: usize,
        planes: &[Vec<T>; 3],
    ) -> Result<Self, RasterError> {
        let n = width * height;
        let mut data = Vec::with_capacity(n * 3);
        for ((r, g), b) in planes[0].iter().zip(&planes[1]).zip(&planes[2]).take(n) {
            data.push(*r);
            data.push(*g);
            data.push(*b);
        }
        Self::from_data(width, height, data)
    }

    pub fn cast<U: Real>(&self) -> ColorImage<U> {
        ColorImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }

    /// Bilinear sample at texel coordinates, clamped to the image edge.
    pub fn sample_bilinear(&self, tx: T, ty: T) -> Vec3<T> {
        let max_x = T::of((self.width - 1) as f64);
        let max_y = T::of((self.height - 1) as f64);
        let tx = tx.max(T::zero()).min(max_x);
        let ty = ty.max(T::zero()).min(max_y);
        let x0 = tx.floor();
        let y0 = ty.floor();
        let fx = tx - x0;
        let fy = ty - y0;
        let x0 = x0.as_f64() as usize;
        let y0 = y0.as_f64() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let a = Vec3::lerp(self.get(x0, y0), self.get(x1, y0), fx);
        let b = Vec3::lerp(self.get(x0, y1), self.get(x1, y1), fx);
        Vec3::lerp(a, b, fy)
    }

    /// Checkerboard of `cells x cells` squares alternating `a` and `b`,
    /// starting with `a` in the top-left cell.
    pub fn checker(width: usize, height: usize, cells: usize, a: Vec3<T>, b: Vec3<T>) -> Self {
        let mut img = Self::new(width, height);
        let cw = (width / cells).max(1);
        let ch = (height / cells).max(1);
        for y in 0..height {
            for x in 0..width {
                let c = if ((x / cw) + (y / ch)) % 2 == 0 { a } else { b };
                img.set(x, y, c);
            }
        }
        img
    }

    /// Encode to an 8-bit sRGB PNG.
    pub fn save_srgb_png(&self, path: &Path) -> Result<(), RasterError> {
        let mut buf = image::RgbImage::new(self.width as u32, self.height as u32);
        for y in 0..self.height {
            for x in 0..self.width {
                let c = self.get(x, y);
                buf.put_pixel(
                    x as u32,
                    y as u32,
                    image::Rgb([
                        linear_to_srgb8(c.x()),
                        linear_to_srgb8(c.y()),
                        linear_to_srgb8(c.z()),
                    ]),
                );
            }
        }
        buf.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }

    /// Decode an 8-bit PNG, applying the inverse sRGB transfer function.
    pub fn load_srgb_png(path: &Path) -> Result<Self, RasterError> {
        let img = image::open(path)?.into_rgb8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let mut out = Self::new(w, h);
        for y in 0..h {
            for x in 0..w {
                let p = img.get_pixel(x as u32, y as u32);
                out.set(
                    x,
                    y,
                    Vec3([
                        srgb8_to_linear(p[0]),
                        srgb8_to_linear(p[1]),
                        srgb8_to_linear(p[2]),
                    ]),
                );
            }
        }
        Ok(out)
    }
}

/// Single-channel per-pixel scalars: masks, depth, luminance maps.
/// Depth maps use `+inf` as the background sentinel; NaN and `-inf` are
/// rejected everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> ScalarMap<T> {
    pub fn new(width: usize, height: usize) -> Self {
        ScalarMap {
            width,
            height,
            data: vec![T::zero(); width * height],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<T>) -> Result<Self, RasterError> {
        let expect = width * height;
        if data.len() != expect {
            return Err(RasterError::BadLength {
                width,
                height,
                expect,
                got: data.len(),
            });
        }
        if let Some(index) = data
            .iter()
            .position(|v| v.is_nan() || *v == T::neg_infinity())
        {
            return Err(RasterError::NonFinite { index });
        }
        Ok(ScalarMap {
            width,
            height,
            data,
        })
    }

    /// Constructor for masks: every value must lie in `[0, 1]`.
    pub fn mask_from_data(width: usize, height: usize, data: Vec<T>) -> Result<Self, RasterError> {
        let map = Self::from_data(width, height, data)?;
        if let Some(index) = map
            .data
            .iter()
            .position(|v| *v < T::zero() || *v > T::one())
        {
            return Err(RasterError::MaskOutOfRange {
                index,
                value: map.data[index].as_f64(),
            });
        }
        Ok(map)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }
    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }
    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }
    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    pub fn cast<U: Real>(&self) -> ScalarMap<U> {
        ScalarMap {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }

    /// Load an 8-bit grayscale PNG as raw values in [0, 1] (no transfer
    /// function; masks are coverage, not color).
    pub fn load_gray_png(path: &Path) -> Result<Self, RasterError> {
        let img = image::open(path)?.into_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let data = img
            .pixels()
            .map(|p| T::of(p[0] as f64 / 255.0))
            .collect::<Vec<_>>();
        Self::from_data(w, h, data)
    }

    pub fn save_gray_png(&self, path: &Path) -> Result<(), RasterError> {
        let mut buf = image::GrayImage::new(self.width as u32, self.height as u32);
        for y in 0..self.height {
            for x in 0..self.width {
                let v = (self.get(x, y).as_f64() * 255.0).round().clamp(0.0, 255.0) as u8;
                buf.put_pixel(x as u32, y as u32, image::Luma([v]));
            }
        }
        buf.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }
}

/// Per-pixel unit 3-vectors (camera-space normals); zero vector marks
/// background pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> NormalMap<T> {
    pub fn new(width: usize, height: usize) -> Self {
        NormalMap {
            width,
            height,
            data: vec![T::zero(); width * height * 3],
        }
    }

    pub fn from_data(width: usize, height: usize, data: Vec<T>) -> Result<Self, RasterError> {
        let expect = width * height * 3;
        if data.len() != expect {
            return Err(RasterError::BadLength {
                width,
                height,
                expect,
                got: data.len(),
            });
        }
        Ok(NormalMap {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }
    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }
    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Vec3<T> {
        let i = (y * self.width + x) * 3;
        Vec3([self.data[i], self.data[i + 1], self.data[i + 2]])
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, n: Vec3<T>) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&n.0);
    }

    pub fn to_planes(&self) -> [Vec<T>; 3] {
        let n = self.width * self.height;
        let mut planes = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for px in self.data.chunks_exact(3) {
            planes[0].push(px[0]);
            planes[1].push(px[1]);
            planes[2].push(px[2]);
        }
        planes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_data_validates_length_and_finiteness() {
        assert!(ColorImage::<f32>::from_data(2, 2, vec![0.0; 11]).is_err());
        let mut data = vec![0.5f32; 12];
        data[7] = f32::NAN;
        assert!(ColorImage::from_data(2, 2, data).is_err());
        assert!(ColorImage::<f32>::from_data(2, 2, vec![0.5; 12]).is_ok());
    }

    #[test]
    fn scalar_map_allows_positive_infinity_only() {
        assert!(ScalarMap::<f64>::from_data(1, 2, vec![1.0, f64::INFINITY]).is_ok());
        assert!(ScalarMap::<f64>::from_data(1, 2, vec![1.0, f64::NEG_INFINITY]).is_err());
        assert!(ScalarMap::<f64>::from_data(1, 2, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn mask_constructor_enforces_unit_range() {
        assert!(ScalarMap::<f32>::mask_from_data(2, 1, vec![0.0, 1.0]).is_ok());
        assert!(ScalarMap::<f32>::mask_from_data(2, 1, vec![0.0, 1.5]).is_err());
    }

    #[test]
    fn bilinear_at_texel_centers_is_exact() {
        let img = ColorImage::<f64>::checker(
            8,
            8,
            4,
            Vec3::splat(1.0),
            Vec3::zero(),
        );
        // (0,0) is in the first (white) cell; (2,0) in the second (black).
        assert_eq!(img.sample_bilinear(0.0, 0.0), Vec3::splat(1.0));
        assert_eq!(img.sample_bilinear(2.0, 0.0), Vec3::zero());
    }

    #[test]
    fn plane_round_trip() {
        let mut img = ColorImage::<f32>::new(3, 2);
        for (i, v) in img.data_mut().iter_mut().enumerate() {
            *v = i as f32 * 0.1;
        }
        let planes = img.to_planes();
        let back = ColorImage::from_planes(3, 2, &planes).unwrap();
        assert_eq!(img, back);
    }
}
