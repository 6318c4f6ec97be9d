//! Procedural test and dataset meshes.

use super::TriangleMesh;
use crate::num::Real;
use crate::vec3::Vec3;
use std::collections::HashMap;

/// Geodesic sphere from a subdivided icosahedron. Vertices lie exactly on
/// the sphere and normals are set analytically to the radial direction.
pub fn icosphere<T: Real>(subdivisions: usize, radius: T) -> TriangleMesh<T> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let base: Vec<Vec3<f64>> = vec![
        Vec3::of(-1.0, phi, 0.0),
        Vec3::of(1.0, phi, 0.0),
        Vec3::of(-1.0, -phi, 0.0),
        Vec3::of(1.0, -phi, 0.0),
        Vec3::of(0.0, -1.0, phi),
        Vec3::of(0.0, 1.0, phi),
        Vec3::of(0.0, -1.0, -phi),
        Vec3::of(0.0, 1.0, -phi),
        Vec3::of(phi, 0.0, -1.0),
        Vec3::of(phi, 0.0, 1.0),
        Vec3::of(-phi, 0.0, -1.0),
        Vec3::of(-phi, 0.0, 1.0),
    ];
    let mut vertices: Vec<Vec3<f64>> = base.into_iter().map(|v| v.normalized()).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                mids[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = ((vertices[a] + vertices[b]) * 0.5).normalized();
                    vertices.push(m);
                    vertices.len() - 1
                });
            }
            next.push([f[0], mids[0], mids[2]]);
            next.push([f[1], mids[1], mids[0]]);
            next.push([f[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        faces = next;
    }

    let normals: Vec<Vec3<T>> = vertices.iter().map(|v| v.cast()).collect();
    let scaled: Vec<Vec3<T>> = vertices.iter().map(|v| (*v * radius.as_f64()).cast()).collect();
    TriangleMesh::with_normals(scaled, faces, normals).expect("icosphere is well-formed")
}

/// Axis-aligned cube of half-extent `half`, centered at the origin. Face
/// diagonals follow the tetrahedral pattern so every corner touches equal
/// incident area on each of its three faces.
pub fn cube<T: Real>(half: T) -> TriangleMesh<T> {
    box_mesh(Vec3::splat(half))
}

/// Axis-aligned box with per-axis half-extents.
pub fn box_mesh<T: Real>(half: Vec3<T>) -> TriangleMesh<T> {
    let corner = |bits: usize| -> Vec3<f64> {
        let sx = if bits & 1 != 0 { 1.0 } else { -1.0 };
        let sy = if bits & 2 != 0 { 1.0 } else { -1.0 };
        let sz = if bits & 4 != 0 { 1.0 } else { -1.0 };
        Vec3::of(sx, sy, sz)
    };
    let vertices_f64: Vec<Vec3<f64>> = (0..8).map(corner).collect();

    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(12);
    // (axis bit, side): the four corners of each face, the two even-parity
    // ones forming the shared diagonal.
    for axis in 0..3usize {
        for side in [0usize, 1] {
            let ids: Vec<usize> = (0..8)
                .filter(|b| (b >> axis) & 1 == side)
                .collect();
            let parity = |b: usize| (b.count_ones() % 2) as usize;
            let even: Vec<usize> = ids.iter().copied().filter(|b| parity(*b) == 0).collect();
            let odd: Vec<usize> = ids.iter().copied().filter(|b| parity(*b) == 1).collect();
            let outward = {
                let mut o = Vec3::<f64>::zero();
                o.0[axis] = if side == 1 { 1.0 } else { -1.0 };
                o
            };
            for &o in &odd {
                let mut tri = [even[0], o, even[1]];
                let n = (vertices_f64[tri[1]] - vertices_f64[tri[0]])
                    .cross(vertices_f64[tri[2]] - vertices_f64[tri[0]]);
                if n.dot(outward) < 0.0 {
                    tri.swap(1, 2);
                }
                faces.push(tri);
            }
        }
    }

    let vertices: Vec<Vec3<T>> = vertices_f64
        .iter()
        .map(|v| Vec3::new(T::of(v.x()) * half.x(), T::of(v.y()) * half.y(), T::of(v.z()) * half.z()))
        .collect();
    TriangleMesh::new(vertices, faces).expect("box is well-formed")
}

/// Torus around the Y axis with analytic normals.
pub fn torus<T: Real>(major: T, minor: T, segments_u: usize, segments_v: usize) -> TriangleMesh<T> {
    let mut vertices = Vec::with_capacity(segments_u * segments_v);
    let mut normals = Vec::with_capacity(segments_u * segments_v);
    let tau = std::f64::consts::TAU;
    for i in 0..segments_u {
        let a = tau * i as f64 / segments_u as f64;
        let (sa, ca) = (a.sin(), a.cos());
        for j in 0..segments_v {
            let b = tau * j as f64 / segments_v as f64;
            let (sb, cb) = (b.sin(), b.cos());
            let ring = major.as_f64() + minor.as_f64() * cb;
            vertices.push(Vec3::<f64>::of(ring * ca, minor.as_f64() * sb, ring * sa).cast::<T>());
            normals.push(Vec3::<f64>::of(cb * ca, sb, cb * sa).cast::<T>());
        }
    }
    let mut faces = Vec::with_capacity(segments_u * segments_v * 2);
    let idx = |i: usize, j: usize| (i % segments_u) * segments_v + (j % segments_v);
    for i in 0..segments_u {
        for j in 0..segments_v {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            faces.push([a, c, b]);
            faces.push([a, d, c]);
        }
    }
    TriangleMesh::with_normals(vertices, faces, normals).expect("torus is well-formed")
}

/// Closed cylinder around the Y axis; rim vertices are duplicated between
/// side and caps so each copy carries its own normal.
pub fn cylinder<T: Real>(radius: T, height: T, segments: usize) -> TriangleMesh<T> {
    let tau = std::f64::consts::TAU;
    let half_h = height.as_f64() / 2.0;
    let r = radius.as_f64();
    let mut vertices: Vec<Vec3<f64>> = Vec::new();
    let mut normals: Vec<Vec3<f64>> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    // Side rings.
    for i in 0..segments {
        let a = tau * i as f64 / segments as f64;
        let (sa, ca) = (a.sin(), a.cos());
        vertices.push(Vec3::of(r * ca, -half_h, r * sa));
        normals.push(Vec3::of(ca, 0.0, sa));
        vertices.push(Vec3::of(r * ca, half_h, r * sa));
        normals.push(Vec3::of(ca, 0.0, sa));
    }
    for i in 0..segments {
        let a0 = 2 * i;
        let a1 = 2 * i + 1;
        let b0 = 2 * ((i + 1) % segments);
        let b1 = b0 + 1;
        faces.push([a0, b0, b1]);
        faces.push([a0, b1, a1]);
    }

    // Caps with their own rim copies.
    for (sign, ny) in [(-1.0, -1.0), (1.0, 1.0)] {
        let center = vertices.len();
        vertices.push(Vec3::of(0.0, sign * half_h, 0.0));
        normals.push(Vec3::of(0.0, ny, 0.0));
        let ring_start = vertices.len();
        for i in 0..segments {
            let a = tau * i as f64 / segments as f64;
            vertices.push(Vec3::of(r * a.cos(), sign * half_h, r * a.sin()));
            normals.push(Vec3::of(0.0, ny, 0.0));
        }
        for i in 0..segments {
            let a = ring_start + i;
            let b = ring_start + (i + 1) % segments;
            if sign > 0.0 {
                faces.push([center, b, a]);
            } else {
                faces.push([center, a, b]);
            }
        }
    }

    TriangleMesh::with_normals(
        vertices.iter().map(|v| v.cast()).collect(),
        faces,
        normals.iter().map(|n| n.cast()).collect(),
    )
    .expect("cylinder is well-formed")
}

/// Sphere displaced radially by deterministic value noise; normals are
/// recomputed from the displaced geometry.
pub fn bumpy_sphere<T: Real>(
    subdivisions: usize,
    radius: T,
    amplitude: T,
    frequency: f64,
    salt: u64,
) -> TriangleMesh<T> {
    let base = icosphere::<f64>(subdivisions, 1.0);
    let vertices: Vec<Vec3<f64>> = base
        .vertices()
        .iter()
        .map(|v| {
            let n = crate::noise::value_noise_3d(
                v.x() * frequency,
                v.y() * frequency,
                v.z() * frequency,
                salt,
            );
            *v * (radius.as_f64() * (1.0 + amplitude.as_f64() * (2.0 * n - 1.0)))
        })
        .collect();
    TriangleMesh::new(vertices, base.faces().to_vec())
        .expect("displaced sphere is well-formed")
        .compute_vertex_normals()
        .expect("displaced sphere normals")
        .cast()
}
