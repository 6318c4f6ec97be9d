//! Triangle meshes: construction, vertex normals, and cover-mesh extrusion.

mod obj;
pub mod shapes;

pub use obj::{load_obj, parse_obj};

use crate::num::Real;
use crate::vec3::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index} but mesh has {count} vertices")]
    FaceIndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("face {face} has zero area")]
    DegenerateFace { face: usize },
    #[error("vertex {vertex} has no incident face")]
    IsolatedVertex { vertex: usize },
    #[error("vertex {vertex} normal sums to zero across incident faces")]
    DegenerateNormal { vertex: usize },
    #[error("vertex normal {vertex} has length {length}, expected 1")]
    NonUnitNormal { vertex: usize, length: f64 },
    #[error("mesh has no faces")]
    NoFaces,
    #[error("mesh has no vertex normals")]
    MissingNormals,
    #[error("extrusion distance {0} must be >= 0")]
    NegativeEpsilon(f64),
    #[error("scale factor {0} must be > 0")]
    NonPositiveScale(f64),
    #[error("OBJ parse error at line {line}: {message}")]
    ObjParse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct TriangleMesh<T> {
    vertices: Vec<Vec3<T>>,
    faces: Vec<[usize; 3]>,
    normals: Option<Vec<Vec3<T>>>,
}

impl<T: Real> TriangleMesh<T> {
    /// Validates face indices and rejects zero-area faces.
    pub fn new(vertices: Vec<Vec3<T>>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        for (fi, f) in faces.iter().enumerate() {
            for &vi in f {
                if vi >= vertices.len() {
                    return Err(MeshError::FaceIndexOutOfRange {
                        face: fi,
                        index: vi,
                        count: vertices.len(),
                    });
                }
            }
            let e1 = vertices[f[1]] - vertices[f[0]];
            let e2 = vertices[f[2]] - vertices[f[0]];
            if e1.cross(e2).length_squared() <= T::zero() {
                return Err(MeshError::DegenerateFace { face: fi });
            }
        }
        Ok(TriangleMesh {
            vertices,
            faces,
            normals: None,
        })
    }

    /// As `new`, but with explicit vertex normals (must be unit within 1e-6).
    pub fn with_normals(
        vertices: Vec<Vec3<T>>,
        faces: Vec<[usize; 3]>,
        normals: Vec<Vec3<T>>,
    ) -> Result<Self, MeshError> {
        let mut mesh = Self::new(vertices, faces)?;
        for (vi, n) in normals.iter().enumerate() {
            let len = n.length().as_f64();
            if (len - 1.0).abs() > 1e-6 {
                return Err(MeshError::NonUnitNormal {
                    vertex: vi,
                    length: len,
                });
            }
        }
        mesh.normals = Some(normals);
        Ok(mesh)
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec3<T>] {
        &self.vertices
    }
    #[inline]
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    #[inline]
    pub fn normals(&self) -> Option<&[Vec3<T>]> {
        self.normals.as_deref()
    }
    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    #[inline]
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Mean vertex position.
    pub fn centroid(&self) -> Vec3<T> {
        let mut sum = Vec3::zero();
        for v in &self.vertices {
            sum += *v;
        }
        sum / T::of(self.vertices.len() as f64)
    }

    /// Returns a copy of the mesh with vertex normals set to the normalized
    /// area-weighted average of incident face normals. Errors when the mesh
    /// has no faces or when a vertex has no incident face.
    pub fn compute_vertex_normals(&self) -> Result<TriangleMesh<T>, MeshError> {
        if self.faces.is_empty() {
            return Err(MeshError::NoFaces);
        }
        let mut accum = vec![Vec3::<T>::zero(); self.vertices.len()];
        let mut touched = vec![false; self.vertices.len()];
        for f in &self.faces {
            let e1 = self.vertices[f[1]] - self.vertices[f[0]];
            let e2 = self.vertices[f[2]] - self.vertices[f[0]];
            // Cross product length is twice the face area, so summing the
            // raw cross products gives the area weighting directly.
            let weighted = e1.cross(e2);
            for &vi in f {
                accum[vi] += weighted;
                touched[vi] = true;
            }
        }
        let mut normals = Vec::with_capacity(self.vertices.len());
        for (vi, (sum, hit)) in accum.into_iter().zip(touched).enumerate() {
            if !hit {
                return Err(MeshError::IsolatedVertex { vertex: vi });
            }
            match sum.try_normalized() {
                Some(n) => normals.push(n),
                None => return Err(MeshError::DegenerateNormal { vertex: vi }),
            }
        }
        Ok(TriangleMesh {
            vertices: self.vertices.clone(),
            faces: self.faces.clone(),
            normals: Some(normals),
        })
    }

    /// Cover-mesh construction: push every vertex out along its normal by
    /// `epsilon`, then scale the result about the mesh centroid so the cover
    /// stays concentric with the substrate. Topology is unchanged and the
    /// input mesh is not modified.
    pub fn extrude_cover(&self, epsilon: T, scale: T) -> Result<TriangleMesh<T>, MeshError> {
        if epsilon < T::zero() {
            return Err(MeshError::NegativeEpsilon(epsilon.as_f64()));
        }
        if !(scale > T::zero()) {
            return Err(MeshError::NonPositiveScale(scale.as_f64()));
        }
        let normals = self.normals.as_ref().ok_or(MeshError::MissingNormals)?;
        let centroid = self.centroid();
        let vertices = self
            .vertices
            .iter()
            .zip(normals)
            .map(|(p, n)| centroid + ((*p + *n * epsilon) - centroid) * scale)
            .collect();
        Ok(TriangleMesh {
            vertices,
            faces: self.faces.clone(),
            normals: Some(normals.clone()),
        })
    }

    /// Translate all vertices (normals unchanged).
    pub fn translated(&self, offset: Vec3<T>) -> TriangleMesh<T> {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| *v + offset).collect(),
            faces: self.faces.clone(),
            normals: self.normals.clone(),
        }
    }

    /// Non-uniform scale about the origin; normals are recomputed afterwards
    /// when they were present.
    pub fn scaled(&self, s: Vec3<T>) -> Result<TriangleMesh<T>, MeshError> {
        let mesh = TriangleMesh {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vec3::new(v.x() * s.x(), v.y() * s.y(), v.z() * s.z()))
                .collect(),
            faces: self.faces.clone(),
            normals: None,
        };
        if self.normals.is_some() {
            mesh.compute_vertex_normals()
        } else {
            Ok(mesh)
        }
    }

    /// Rotate about the Y axis by `angle` radians; normals rotate with it.
    pub fn rotated_y(&self, angle: T) -> TriangleMesh<T> {
        let (s, c) = (angle.sin(), angle.cos());
        let rot = |v: Vec3<T>| Vec3::new(c * v.x() + s * v.z(), v.y(), -s * v.x() + c * v.z());
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| rot(*v)).collect(),
            faces: self.faces.clone(),
            normals: self
                .normals
                .as_ref()
                .map(|ns| ns.iter().map(|n| rot(*n)).collect()),
        }
    }

    pub fn cast<U: Real>(&self) -> TriangleMesh<U> {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| v.cast()).collect(),
            faces: self.faces.clone(),
            normals: self
                .normals
                .as_ref()
                .map(|ns| ns.iter().map(|n| n.cast()).collect()),
        }
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn aabb(&self) -> (Vec3<T>, Vec3<T>) {
        let mut lo = Vec3::splat(T::infinity());
        let mut hi = Vec3::splat(T::neg_infinity());
        for v in &self.vertices {
            for k in 0..3 {
                lo.0[k] = lo.0[k].min(v.0[k]);
                hi.0[k] = hi.0[k].max(v.0[k]);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::shapes;
    use super::*;

    fn flat_quad() -> TriangleMesh<f64> {
        // Two triangles spanning [-1,1]^2 at z = 0, facing +z.
        let vertices = vec![
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(-1.0, 1.0, 0.0),
        ];
        let faces = vec![[0, 1, 2], [0, 2, 3]];
        TriangleMesh::new(vertices, faces).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_indices_and_degenerate_faces() {
        let vs = vec![
            Vec3::<f64>::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        assert!(TriangleMesh::new(vs.clone(), vec![[0, 1, 5]]).is_err());
        assert!(TriangleMesh::new(vs.clone(), vec![[0, 1, 1]]).is_err());
        assert!(TriangleMesh::new(vs, vec![[0, 1, 2]]).is_ok());
    }

    #[test]
    fn flat_quad_normals_point_up() {
        let mesh = flat_quad().compute_vertex_normals().unwrap();
        for n in mesh.normals().unwrap() {
            assert_eq!(*n, Vec3::new(0.0, 0.0, 1.0));
        }
    }

    #[test]
    fn cube_corner_normals_match_area_weighted_oracle() {
        let mesh = shapes::cube(1.0).compute_vertex_normals().unwrap();
        // Independent oracle: accumulate area-weighted face normals per
        // vertex straight from the triangle list.
        let mut oracle = vec![Vec3::<f64>::zero(); mesh.vertex_count()];
        for f in mesh.faces() {
            let a = mesh.vertices()[f[0]];
            let b = mesh.vertices()[f[1]];
            let c = mesh.vertices()[f[2]];
            let weighted = (b - a).cross(c - a);
            for &vi in f {
                oracle[vi] += weighted;
            }
        }
        let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
        for (vi, v) in mesh.vertices().iter().enumerate() {
            let got = mesh.normals().unwrap()[vi];
            let want = oracle[vi].normalized();
            assert!((got - want).length() < 1e-12);
            // With the face diagonals arranged so every corner sees equal
            // incident area per cube face, each corner normal is the
            // normalized sum of its three face normals: sign(p)/sqrt(3).
            let expect = v.map(|x| x.signum() * inv_sqrt3);
            assert!(
                (got - expect).length() < 1e-12,
                "corner {v:?}: got {got:?}, expected {expect:?}"
            );
        }
    }

    #[test]
    fn icosphere_normals_are_radial() {
        let mesh = shapes::icosphere(4, 1.0).compute_vertex_normals().unwrap();
        for (v, n) in mesh.vertices().iter().zip(mesh.normals().unwrap()) {
            let radial = v.normalized();
            assert!(
                (*n - radial).length() < 1e-2,
                "normal {n:?} vs radial {radial:?}"
            );
        }
    }

    #[test]
    fn isolated_vertex_is_a_topology_error() {
        let mut vs = flat_quad().vertices().to_vec();
        vs.push(Vec3::new(9.0, 9.0, 9.0));
        let mesh = TriangleMesh::new(vs, flat_quad().faces().to_vec()).unwrap();
        assert!(matches!(
            mesh.compute_vertex_normals(),
            Err(MeshError::IsolatedVertex { vertex: 4 })
        ));
    }

    #[test]
    fn extrude_identity_parameters_is_identity() {
        let mesh = shapes::icosphere(1, 1.0);
        let out = mesh.extrude_cover(0.0, 1.0).unwrap();
        assert_eq!(mesh.vertices(), out.vertices());
        assert_eq!(mesh.faces(), out.faces());
    }

    #[test]
    fn extrude_unit_sphere_radius_is_closed_form() {
        // Radial displacement: (1 + eps) * scale.
        let mesh = shapes::icosphere::<f64>(3, 1.0);
        let out = mesh.extrude_cover(0.0004, 1.0005).unwrap();
        let expect = 1.0004 * 1.0005;
        for v in out.vertices() {
            assert!(
                (v.length() - expect).abs() < 1e-9,
                "radius {} vs {expect}",
                v.length()
            );
        }
        assert_eq!(out.face_count(), mesh.face_count());
        assert_eq!(out.vertex_count(), mesh.vertex_count());
    }

    #[test]
    fn extrude_flat_quad_shifts_along_normal() {
        let mesh = flat_quad().compute_vertex_normals().unwrap();
        let out = mesh.extrude_cover(0.1, 1.0).unwrap();
        for v in out.vertices() {
            assert!((v.z() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn extrude_requires_normals_and_valid_parameters() {
        let plain = flat_quad();
        assert!(matches!(
            plain.extrude_cover(0.1, 1.0),
            Err(MeshError::MissingNormals)
        ));
        let mesh = plain.compute_vertex_normals().unwrap();
        assert!(mesh.extrude_cover(-0.1, 1.0).is_err());
        assert!(mesh.extrude_cover(0.1, 0.0).is_err());
    }

    #[test]
    fn extrude_convex_shapes_moves_vertices_outside() {
        // Sphere: signed distance is |p| - 1.
        let sphere = shapes::icosphere::<f64>(2, 1.0);
        for v in sphere.extrude_cover(0.05, 1.01).unwrap().vertices() {
            assert!(v.length() - 1.0 > 0.0);
        }
        // Cube: signed distance of the max-norm box.
        let cube = shapes::cube::<f64>(1.0).compute_vertex_normals().unwrap();
        for v in cube.extrude_cover(0.05, 1.0).unwrap().vertices() {
            let d = v.x().abs().max(v.y().abs()).max(v.z().abs()) - 1.0;
            assert!(d > 0.0, "vertex {v:?} not outside the cube");
        }
    }

    #[test]
    fn vertex_normals_invariant_to_face_order() {
        let mesh = shapes::icosphere(2, 1.0);
        let base = TriangleMesh::new(mesh.vertices().to_vec(), mesh.faces().to_vec()).unwrap();
        let normals_a = base.compute_vertex_normals().unwrap();
        let mut faces = mesh.faces().to_vec();
        faces.reverse();
        // Interleave a deterministic shuffle.
        let mid = faces.len() / 2;
        let (front, back) = faces.split_at(mid);
        let shuffled: Vec<[usize; 3]> = back
            .iter()
            .zip(front.iter())
            .flat_map(|(a, b)| [*a, *b])
            .chain(faces.iter().skip(2 * mid).copied())
            .collect();
        let normals_b = TriangleMesh::new(mesh.vertices().to_vec(), shuffled)
            .unwrap()
            .compute_vertex_normals()
            .unwrap();
        for (a, b) in normals_a
            .normals()
            .unwrap()
            .iter()
            .zip(normals_b.normals().unwrap())
        {
            assert!((*a - *b).length() < 1e-12);
        }
    }
}
