//! Wavefront OBJ loader: `v`, `vn`, and `f` records (triangles and fans);
//! materials and texture coordinates are ignored.

use super::{MeshError, TriangleMesh};
use crate::num::Real;
use crate::vec3::Vec3;
use std::path::Path;

pub fn load_obj<T: Real>(path: &Path) -> Result<TriangleMesh<T>, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_obj(&text)
}

pub fn parse_obj<T: Real>(text: &str) -> Result<TriangleMesh<T>, MeshError> {
    let mut positions: Vec<Vec3<T>> = Vec::new();
    let mut obj_normals: Vec<Vec3<T>> = Vec::new();
    // normal index per vertex, when faces reference `vn` records
    let mut vertex_normal_idx: Vec<Option<usize>> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    let err = |line: usize, message: &str| MeshError::ObjParse {
        line,
        message: message.to_string(),
    };

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut coords = [T::zero(); 3];
                for c in coords.iter_mut() {
                    let tok = parts.next().ok_or_else(|| err(line_no, "v needs 3 coords"))?;
                    *c = T::of(tok
                        .parse::<f64>()
                        .map_err(|_| err(line_no, "bad coordinate"))?);
                }
                positions.push(Vec3(coords));
                vertex_normal_idx.push(None);
            }
            Some("vn") => {
                let mut coords = [T::zero(); 3];
                for c in coords.iter_mut() {
                    let tok = parts.next().ok_or_else(|| err(line_no, "vn needs 3 coords"))?;
                    *c = T::of(tok
                        .parse::<f64>()
                        .map_err(|_| err(line_no, "bad normal"))?);
                }
                obj_normals.push(Vec3(coords));
            }
            Some("f") => {
                let mut verts: Vec<(usize, Option<usize>)> = Vec::new();
                for tok in parts {
                    let mut it = tok.split('/');
                    let vi: i64 = it
                        .next()
                        .filter(|s| !s.is_empty())
                        .ok_or_else(|| err(line_no, "empty face index"))?
                        .parse()
                        .map_err(|_| err(line_no, "bad face index"))?;
                    let _vt = it.next();
                    let vn = match it.next() {
                        Some(s) if !s.is_empty() => Some(
                            s.parse::<i64>()
                                .map_err(|_| err(line_no, "bad normal index"))?,
                        ),
                        _ => None,
                    };
                    let resolve = |idx: i64, count: usize| -> Result<usize, MeshError> {
                        let r = if idx > 0 {
                            idx as usize - 1
                        } else if idx < 0 {
                            let back = (-idx) as usize;
                            if back > count {
                                return Err(err(line_no, "relative index out of range"));
                            }
                            count - back
                        } else {
                            return Err(err(line_no, "face index 0"));
                        };
                        if r >= count {
                            return Err(err(line_no, "face index out of range"));
                        }
                        Ok(r)
                    };
                    let v = resolve(vi, positions.len())?;
                    let n = match vn {
                        Some(ni) => Some(resolve(ni, obj_normals.len())?),
                        None => None,
                    };
                    verts.push((v, n));
                }
                if verts.len() < 3 {
                    return Err(err(line_no, "face needs at least 3 vertices"));
                }
                for (v, n) in &verts {
                    if let Some(ni) = n {
                        vertex_normal_idx[*v] = Some(*ni);
                    }
                }
                // Fan triangulation for polygons.
                for k in 1..verts.len() - 1 {
                    faces.push([verts[0].0, verts[k].0, verts[k + 1].0]);
                }
            }
            // mtllib, usemtl, vt, o, g, s, ... are ignored.
            _ => {}
        }
    }

    let all_have_normals =
        !positions.is_empty() && vertex_normal_idx.iter().all(|n| n.is_some());
    if all_have_normals {
        let normals: Vec<Vec3<T>> = vertex_normal_idx
            .iter()
            .map(|n| {
                obj_normals[n.unwrap()]
                    .try_normalized()
                    .unwrap_or_else(|| Vec3::new(T::zero(), T::one(), T::zero()))
            })
            .collect();
        TriangleMesh::with_normals(positions, faces, normals)
    } else {
        TriangleMesh::new(positions, faces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangles_and_fans() {
        let text = "\
# quad as a fan
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
f 1 2 3 4
";
        let mesh = parse_obj::<f64>(text).unwrap();
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(mesh.face_count(), 2);
        assert!(mesh.normals().is_none());
    }

    #[test]
    fn parses_normals_and_slash_formats() {
        let text = "\
v 0 0 0
v 1 0 0
v 0 1 0
vn 0 0 1
f 1//1 2//1 3//1
";
        let mesh = parse_obj::<f32>(text).unwrap();
        let normals = mesh.normals().unwrap();
        assert_eq!(normals[0], Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn rejects_out_of_range_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n";
        assert!(matches!(
            parse_obj::<f64>(text),
            Err(MeshError::ObjParse { line: 4, .. })
        ));
    }

    #[test]
    fn ignores_materials_and_texcoords() {
        let text = "\
mtllib scene.mtl
usemtl red
v 0 0 0
v 1 0 0
v 0 1 0
vt 0 0
f 1/1 2/1 3/1
";
        let mesh = parse_obj::<f64>(text).unwrap();
        assert_eq!(mesh.face_count(), 1);
    }
}
