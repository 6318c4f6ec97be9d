//! Deterministic value noise on integer lattices, 2D and 3D.
//!
//! Lattice values are pure hashes of the cell coordinates and a salt, so a
//! field is fully determined by its salt regardless of evaluation order.

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn lattice(ix: i64, iy: i64, iz: i64, salt: u64) -> f64 {
    let z = (ix as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((iy as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F))
        .wrapping_add((iz as u64).wrapping_mul(0x1656_67B1_9E37_79F9))
        .wrapping_add(mix(salt));
    (mix(z) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn fade(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Smoothly interpolated value noise in `[0, 1)`.
pub fn value_noise_2d(x: f64, y: f64, salt: u64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let (ix, iy) = (x0 as i64, y0 as i64);
    let fx = fade(x - x0);
    let fy = fade(y - y0);
    let v00 = lattice(ix, iy, 0, salt);
    let v10 = lattice(ix + 1, iy, 0, salt);
    let v01 = lattice(ix, iy + 1, 0, salt);
    let v11 = lattice(ix + 1, iy + 1, 0, salt);
    let a = v00 + (v10 - v00) * fx;
    let b = v01 + (v11 - v01) * fx;
    a + (b - a) * fy
}

/// Smoothly interpolated value noise in `[0, 1)`.
pub fn value_noise_3d(x: f64, y: f64, z: f64, salt: u64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let z0 = z.floor();
    let (ix, iy, iz) = (x0 as i64, y0 as i64, z0 as i64);
    let fx = fade(x - x0);
    let fy = fade(y - y0);
    let fz = fade(z - z0);
    let mut planes = [0.0; 2];
    for (k, plane) in planes.iter_mut().enumerate() {
        let izk = iz + k as i64;
        let v00 = lattice(ix, iy, izk, salt);
        let v10 = lattice(ix + 1, iy, izk, salt);
        let v01 = lattice(ix, iy + 1, izk, salt);
        let v11 = lattice(ix + 1, iy + 1, izk, salt);
        let a = v00 + (v10 - v00) * fx;
        let b = v01 + (v11 - v01) * fx;
        *plane = a + (b - a) * fy;
    }
    planes[0] + (planes[1] - planes[0]) * fz
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        for i in 0..500 {
            let x = i as f64 * 0.173 - 40.0;
            let y = i as f64 * 0.311 + 3.0;
            let z = i as f64 * 0.071 - 7.0;
            let a = value_noise_3d(x, y, z, 42);
            let b = value_noise_3d(x, y, z, 42);
            assert_eq!(a, b);
            assert!((0.0..1.0).contains(&a));
        }
    }

    #[test]
    fn salt_changes_field() {
        let a = value_noise_2d(1.3, 2.7, 1);
        let b = value_noise_2d(1.3, 2.7, 2);
        assert_ne!(a, b);
    }

    #[test]
    fn continuity_at_small_steps() {
        let mut prev = value_noise_2d(0.0, 0.5, 9);
        for i in 1..1000 {
            let v = value_noise_2d(i as f64 * 1e-3, 0.5, 9);
            assert!((v - prev).abs() < 0.02);
            prev = v;
        }
    }
}
