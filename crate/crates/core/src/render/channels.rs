//! Intrinsic channel stacks and their on-disk format.
//!
//! Float channels are stored planar as little-endian 32-bit IEEE-754 in a
//! `<name>.raw` file with a `<name>.hdr` sidecar text header carrying
//! width, height, channel count, and the channel name. Background depth is
//! written as the IEEE positive-infinity bit pattern.

use super::RenderError;
use crate::num::Real;
use crate::raster::{ColorImage, NormalMap, ScalarMap};
use std::io::{Read, Write};
use std::path::Path;

/// A render's intrinsic decomposition. `residual` always equals
/// `image - albedo * shading` component-wise by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelStack<T> {
    pub image: ColorImage<T>,
    pub albedo: ColorImage<T>,
    pub normals: NormalMap<T>,
    pub depth: ScalarMap<T>,
    pub shading: ColorImage<T>,
    pub residual: ColorImage<T>,
    pub object_mask: ScalarMap<T>,
}

pub const CHANNEL_NAMES: [&str; 7] = [
    "image",
    "albedo",
    "normals",
    "depth",
    "shading",
    "residual",
    "object_mask",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMeta {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub name: String,
}

/// Write one channel file pair (`<dir>/<name>.raw` + `.hdr`).
pub fn write_channel_f32(
    dir: &Path,
    name: &str,
    width: usize,
    height: usize,
    planes: &[&[f32]],
) -> Result<(), RenderError> {
    for plane in planes {
        if plane.len() != width * height {
            return Err(RenderError::BadChannelFile {
                path: dir.join(name).display().to_string(),
                message: format!(
                    "plane length {} does not match {width}x{height}",
                    plane.len()
                ),
            });
        }
    }
    let mut raw = std::fs::File::create(dir.join(format!("{name}.raw")))?;
    let mut buf = Vec::with_capacity(width * height * planes.len() * 4);
    for plane in planes {
        for v in *plane {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    raw.write_all(&buf)?;
    let header = format!(
        "width {width}\nheight {height}\nchannels {}\nname {name}\n",
        planes.len()
    );
    std::fs::write(dir.join(format!("{name}.hdr")), header)?;
    Ok(())
}

/// Read one channel file pair back as planar data.
pub fn read_channel_f32(dir: &Path, name: &str) -> Result<(ChannelMeta, Vec<Vec<f32>>), RenderError> {
    let hdr_path = dir.join(format!("{name}.hdr"));
    let bad = |message: String| RenderError::BadChannelFile {
        path: hdr_path.display().to_string(),
        message,
    };
    let text = std::fs::read_to_string(&hdr_path)?;
    let mut width = None;
    let mut height = None;
    let mut channels = None;
    let mut parsed_name = None;
    for line in text.lines() {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some("width"), Some(v)) => width = v.parse::<usize>().ok(),
            (Some("height"), Some(v)) => height = v.parse::<usize>().ok(),
            (Some("channels"), Some(v)) => channels = v.parse::<usize>().ok(),
            (Some("name"), Some(v)) => parsed_name = Some(v.to_string()),
            _ => {}
        }
    }
    let meta = ChannelMeta {
        width: width.ok_or_else(|| bad("missing width".into()))?,
        height: height.ok_or_else(|| bad("missing height".into()))?,
        channels: channels.ok_or_else(|| bad("missing channels".into()))?,
        name: parsed_name.ok_or_else(|| bad("missing name".into()))?,
    };
    let mut raw = Vec::new();
    std::fs::File::open(dir.join(format!("{name}.raw")))?.read_to_end(&mut raw)?;
    let expect = meta.width * meta.height * meta.channels * 4;
    if raw.len() != expect {
        return Err(bad(format!("raw has {} bytes, expected {expect}", raw.len())));
    }
    let plane_len = meta.width * meta.height;
    let mut planes = Vec::with_capacity(meta.channels);
    for c in 0..meta.channels {
        let mut plane = Vec::with_capacity(plane_len);
        for i in 0..plane_len {
            let off = (c * plane_len + i) * 4;
            plane.push(f32::from_le_bytes([
                raw[off],
                raw[off + 1],
                raw[off + 2],
                raw[off + 3],
            ]));
        }
        planes.push(plane);
    }
    Ok((meta, planes))
}

fn color_planes_f32<T: Real>(img: &ColorImage<T>) -> [Vec<f32>; 3] {
    let planes = img.to_planes();
    planes.map(|p| p.into_iter().map(|v| v.as_f64() as f32).collect())
}

fn color_from_planes<T: Real>(
    meta: &ChannelMeta,
    planes: Vec<Vec<f32>>,
) -> Result<ColorImage<T>, RenderError> {
    let planes: Vec<Vec<T>> = planes
        .into_iter()
        .map(|p| p.into_iter().map(|v| T::of(v as f64)).collect())
        .collect();
    let arr: [Vec<T>; 3] = planes.try_into().map_err(|_| RenderError::BadChannelFile {
        path: meta.name.clone(),
        message: "expected 3 channels".into(),
    })?;
    Ok(ColorImage::from_planes(meta.width, meta.height, &arr)?)
}

impl<T: Real> ChannelStack<T> {
    pub fn width(&self) -> usize {
        self.image.width()
    }
    pub fn height(&self) -> usize {
        self.image.height()
    }

    /// Write all seven channels into `dir` (created if missing).
    pub fn save_dir(&self, dir: &Path) -> Result<(), RenderError> {
        std::fs::create_dir_all(dir)?;
        let (w, h) = (self.width(), self.height());
        let im = color_planes_f32(&self.image);
        write_channel_f32(dir, "image", w, h, &[&im[0], &im[1], &im[2]])?;
        let al = color_planes_f32(&self.albedo);
        write_channel_f32(dir, "albedo", w, h, &[&al[0], &al[1], &al[2]])?;
        let nm = self.normals.to_planes();
        let nm: [Vec<f32>; 3] = nm.map(|p| p.into_iter().map(|v| v.as_f64() as f32).collect());
        write_channel_f32(dir, "normals", w, h, &[&nm[0], &nm[1], &nm[2]])?;
        let dp: Vec<f32> = self.depth.data().iter().map(|v| v.as_f64() as f32).collect();
        write_channel_f32(dir, "depth", w, h, &[&dp])?;
        let sh = color_planes_f32(&self.shading);
        write_channel_f32(dir, "shading", w, h, &[&sh[0], &sh[1], &sh[2]])?;
        let rs = color_planes_f32(&self.residual);
        write_channel_f32(dir, "residual", w, h, &[&rs[0], &rs[1], &rs[2]])?;
        let om: Vec<f32> = self
            .object_mask
            .data()
            .iter()
            .map(|v| v.as_f64() as f32)
            .collect();
        write_channel_f32(dir, "object_mask", w, h, &[&om])?;
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<Self, RenderError> {
        let (meta, planes) = read_channel_f32(dir, "image")?;
        let image = color_from_planes(&meta, planes)?;
        let (meta_a, planes) = read_channel_f32(dir, "albedo")?;
        let albedo = color_from_planes(&meta_a, planes)?;
        let (meta_n, planes) = read_channel_f32(dir, "normals")?;
        let mut ndata = Vec::with_capacity(meta_n.width * meta_n.height * 3);
        for i in 0..meta_n.width * meta_n.height {
            for plane in planes.iter().take(3) {
                ndata.push(T::of(plane[i] as f64));
            }
        }
        let normals = NormalMap::from_data(meta_n.width, meta_n.height, ndata)?;
        let (meta_d, planes) = read_channel_f32(dir, "depth")?;
        let depth = ScalarMap::from_data(
            meta_d.width,
            meta_d.height,
            planes[0].iter().map(|v| T::of(*v as f64)).collect(),
        )?;
        let (meta_s, planes) = read_channel_f32(dir, "shading")?;
        let shading = color_from_planes(&meta_s, planes)?;
        let (meta_r, planes) = read_channel_f32(dir, "residual")?;
        let residual = color_from_planes(&meta_r, planes)?;
        let (meta_m, planes) = read_channel_f32(dir, "object_mask")?;
        let object_mask = ScalarMap::from_data(
            meta_m.width,
            meta_m.height,
            planes[0].iter().map(|v| T::of(*v as f64)).collect(),
        )?;
        Ok(ChannelStack {
            image,
            albedo,
            normals,
            depth,
            shading,
            residual,
            object_mask,
        })
    }
}

/// ScalarMap as a single-channel file (used for coat masks).
pub fn write_scalar_map_f32<T: Real>(
    dir: &Path,
    name: &str,
    map: &ScalarMap<T>,
) -> Result<Vec<u8>, RenderError> {
    let plane: Vec<f32> = map.data().iter().map(|v| v.as_f64() as f32).collect();
    write_channel_f32(dir, name, map.width(), map.height(), &[&plane])?;
    let mut bytes = Vec::with_capacity(plane.len() * 4);
    for v in &plane {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    Ok(bytes)
}

pub fn read_scalar_map_f32<T: Real>(dir: &Path, name: &str) -> Result<ScalarMap<T>, RenderError> {
    let (meta, planes) = read_channel_f32(dir, name)?;
    Ok(ScalarMap::from_data(
        meta.width,
        meta.height,
        planes[0].iter().map(|v| T::of(*v as f64)).collect(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_file_round_trip_preserves_bits_and_infinity() {
        let dir = tempfile::tempdir().unwrap();
        let plane = vec![0.0f32, 1.5, -2.25, f32::INFINITY, 3.125e-7, 42.0];
        write_channel_f32(dir.path(), "depth", 3, 2, &[&plane]).unwrap();
        let (meta, planes) = read_channel_f32(dir.path(), "depth").unwrap();
        assert_eq!(meta.width, 3);
        assert_eq!(meta.height, 2);
        assert_eq!(meta.channels, 1);
        assert_eq!(meta.name, "depth");
        for (a, b) in plane.iter().zip(&planes[0]) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
