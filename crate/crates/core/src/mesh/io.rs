use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use super::TriMesh;
use crate::error::{Error, Result};
use crate::math::Vec3;

/// A mesh read from disk together with the number of zero-area triangles that were dropped.
#[derive(Debug, Clone)]
pub struct LoadedMesh {
    pub mesh: TriMesh,
    pub dropped: usize,
}

/// Loads an STL (ASCII or binary) or OBJ file. The format is chosen by extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<LoadedMesh> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let (vertices, faces) = match ext.as_str() {
        "obj" => {
            let text = std::str::from_utf8(&bytes).map_err(|e| Error::parse(path, e.to_string()))?;
            parse_obj(text).map_err(|m| Error::parse(path, m))?
        }
        _ => parse_stl(&bytes).map_err(|m| Error::parse(path, m))?,
    };
    let (mesh, dropped) = TriMesh::from_triangles(vertices, faces)?;
    if dropped > 0 {
        warn!("{}: dropped {dropped} degenerate triangles", path.display());
    }
    Ok(LoadedMesh { mesh, dropped })
}

type Indexed = (Vec<Vec3>, Vec<[usize; 3]>);

/// Parses STL bytes into welded vertices and faces. Facet normals stored in the file are ignored.
pub fn parse_stl(bytes: &[u8]) -> Result<Indexed, String> {
    let is_binary = bytes.len() >= 84 && {
        let n = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
        84 + 50 * n == bytes.len()
    };
    let mut welder = Welder::default();
    let mut faces = Vec::new();
    if is_binary {
        let n = (bytes.len() - 84) / 50;
        for i in 0..n {
            let rec = &bytes[84 + 50 * i..84 + 50 * (i + 1)];
            let mut tri = [0usize; 3];
            for (k, slot) in tri.iter_mut().enumerate() {
                let off = 12 + 12 * k;
                let f = |j: usize| {
                    let s = off + 4 * j;
                    f32::from_le_bytes([rec[s], rec[s + 1], rec[s + 2], rec[s + 3]]) as f64
                };
                *slot = welder.id(Vec3::new(f(0), f(1), f(2)));
            }
            faces.push(tri);
        }
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| format!("not ASCII STL: {e}"))?;
        let mut pending: Vec<usize> = Vec::with_capacity(3);
        for (ln, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("vertex") => {
                    let c: Vec<f64> = it
                        .map(|s| s.parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| format!("line {}: {e}", ln + 1))?;
                    if c.len() != 3 {
                        return Err(format!("line {}: vertex needs 3 coordinates", ln + 1));
                    }
                    pending.push(welder.id(Vec3::new(c[0], c[1], c[2])));
                }
                Some("endloop") => {
                    if pending.len() != 3 {
                        return Err(format!("line {}: facet with {} vertices", ln + 1, pending.len()));
                    }
                    faces.push([pending[0], pending[1], pending[2]]);
                    pending.clear();
                }
                _ => {}
            }
        }
        if faces.is_empty() && !text.trim_start().starts_with("solid") {
            return Err("neither binary nor ASCII STL".into());
        }
    }
    Ok((welder.vertices, faces))
}

/// Parses the `v` and `f` records of a Wavefront OBJ file; polygons are fan-triangulated.
pub fn parse_obj(text: &str) -> Result<Indexed, String> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("line {}: {e}", ln + 1))?;
                if c.len() != 3 {
                    return Err(format!("line {}: vertex needs 3 coordinates", ln + 1));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|e| format!("line {}: {e}", ln + 1))?;
                        let resolved = if i < 0 { vertices.len() as i64 + i } else { i - 1 };
                        if resolved < 0 {
                            return Err(format!("line {}: bad index {i}", ln + 1));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_, String>>()?;
                if idx.len() < 3 {
                    return Err(format!("line {}: face needs at least 3 vertices", ln + 1));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

/// Renders a mesh as ASCII STL.
pub fn write_stl_ascii(mesh: &TriMesh, name: &str) -> String {
    let mut s = format!("solid {name}\n");
    for f in 0..mesh.face_count() {
        let n = mesh.normal(f);
        let _ = writeln!(s, "  facet normal {:e} {:e} {:e}", n.x, n.y, n.z);
        s.push_str("    outer loop\n");
        for v in mesh.triangle(f) {
            let _ = writeln!(s, "      vertex {:e} {:e} {:e}", v.x, v.y, v.z);
        }
        s.push_str("    endloop\n  endfacet\n");
    }
    let _ = writeln!(s, "endsolid {name}");
    s
}

#[derive(Default)]
struct Welder {
    vertices: Vec<Vec3>,
    index: HashMap<[u64; 3], usize>,
}

impl Welder {
    fn id(&mut self, p: Vec3) -> usize {
        // -0.0 and 0.0 must weld together
        let key = [(p.x + 0.0).to_bits(), (p.y + 0.0).to_bits(), (p.z + 0.0).to_bits()];
        let vertices = &mut self.vertices;
        *self.index.entry(key).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary_stl(tris: &[[[f32; 3]; 3]]) -> Vec<u8> {
        let mut b = vec![0u8; 80];
        b.extend_from_slice(&(tris.len() as u32).to_le_bytes());
        for t in tris {
            b.extend_from_slice(&[0u8; 12]);
            for v in t {
                for c in v {
                    b.extend_from_slice(&c.to_le_bytes());
                }
            }
            b.extend_from_slice(&[0u8; 2]);
        }
        b
    }

    #[test]
    fn binary_stl_welds_vertices() {
        let b = binary_stl(&[
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
        ]);
        let (v, f) = parse_stl(&b).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn ascii_roundtrip_preserves_geometry() {
        let m = TriMesh::cuboid(Vec3::zeros(), Vec3::new(0.1, 0.2, 0.3));
        let (v, f) = parse_stl(write_stl_ascii(&m, "box").as_bytes()).unwrap();
        let back = TriMesh::new(v, f).unwrap();
        assert_eq!(back.face_count(), 12);
        assert!((back.area() - m.area()).abs() < 1e-12);
    }

    #[test]
    fn obj_quads_are_triangulated() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 4/4\n";
        let (v, f) = parse_obj(text).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(f, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_bad_index_is_an_error() {
        assert!(parse_obj("v 0 0 0\nf 1 x 2\n").is_err());
    }
}
