//! Indexed triangle meshes and the geometric queries used by grasp planning.

mod cluster;
pub mod collision;
mod io;
mod ray;
mod sample;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::math::Vec3;

pub use cluster::{cluster_facets, FacetCluster};
pub use collision::{check_gripper_collision, Aabb, Obb};
pub use io::{load_mesh, parse_obj, parse_stl, write_stl_ascii, LoadedMesh};
pub use ray::{ray_opposite_contact, RayHit, ANTIPODAL_TOL_DEG};
pub use sample::{sample_contact_points, ContactPoint};

/// Indexed triangle mesh with one outward unit normal per face. Units are meters.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
    /// Every edge is shared by exactly two faces.
    closed: bool,
}

impl TriMesh {
    /// Builds a mesh, dropping zero-area triangles. Returns the mesh and the number dropped.
    pub fn from_triangles(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<(TriMesh, usize)> {
        let mut kept = Vec::with_capacity(faces.len());
        let mut normals = Vec::with_capacity(faces.len());
        let mut dropped = 0;
        for f in faces {
            if f.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::validation(format!(
                    "face {f:?} references a vertex beyond {}",
                    vertices.len()
                )));
            }
            let (a, b, c) = (vertices[f[0]], vertices[f[1]], vertices[f[2]]);
            if !(a.iter().chain(b.iter()).chain(c.iter())).all(|x| x.is_finite()) {
                dropped += 1;
                continue;
            }
            let cross = (b - a).cross(&(c - a));
            let scale = (b - a).norm_squared().max((c - a).norm_squared()).max((c - b).norm_squared());
            if scale == 0.0 || cross.norm() <= 1e-12 * scale {
                dropped += 1;
                continue;
            }
            normals.push(cross.normalize());
            kept.push(f);
        }
        if kept.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let mut mesh = TriMesh {
            vertices,
            faces: kept,
            normals,
            closed: false,
        };
        mesh.closed = mesh.edge_map().values().all(|f| f.len() == 2);
        Ok((mesh, dropped))
    }

    /// Like [`from_triangles`](Self::from_triangles) but rejects degenerate faces instead of dropping them.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<TriMesh> {
        let n = faces.len();
        let (mesh, dropped) = Self::from_triangles(vertices, faces)?;
        if dropped > 0 {
            return Err(Error::validation(format!("{dropped} of {n} faces are degenerate")));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn facet_normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let f = self.faces[face];
        [self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]]
    }

    pub fn normal(&self, face: usize) -> Vec3 {
        self.normals[face]
    }

    pub fn face_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn area(&self) -> f64 {
        (0..self.face_count()).map(|f| self.face_area(f)).sum()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Generalized winding number of `p`: the summed signed solid angle of all faces over 4π.
    /// About 1 inside a closed outward-oriented surface and 0 outside; overlapping closed
    /// components add up.
    pub fn winding_number(&self, p: &Vec3) -> f64 {
        let total: f64 = (0..self.face_count())
            .map(|f| {
                let [a, b, c] = self.triangle(f).map(|v| v - p);
                let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
                let num = a.dot(&b.cross(&c));
                let den = la * lb * lc + a.dot(&b) * lc + b.dot(&c) * la + c.dot(&a) * lb;
                2.0 * num.atan2(den)
            })
            .sum();
        total / (4.0 * std::f64::consts::PI)
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.faces.iter().flatten().map(|&i| &self.vertices[i]))
    }

    pub fn centroid(&self) -> Vec3 {
        let b = self.aabb();
        (b.min + b.max) * 0.5
    }

    /// Undirected edge -> faces sharing it. Edges are keyed by sorted vertex ids, so
    /// adjacency requires shared (welded) vertices.
    pub fn edge_map(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
        map
    }

    /// Applies a rigid transform to every vertex.
    pub fn transformed(&self, pose: &crate::math::Pose) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| pose.transform_point(v)).collect(),
            faces: self.faces.clone(),
            normals: self.normals.iter().map(|n| pose.transform_vector(n)).collect(),
            closed: self.closed,
        }
    }

    /// Concatenates meshes without welding vertices.
    pub fn merge(parts: &[TriMesh]) -> Result<TriMesh> {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for m in parts {
            let off = vertices.len();
            vertices.extend_from_slice(&m.vertices);
            faces.extend(m.faces.iter().map(|f| [f[0] + off, f[1] + off, f[2] + off]));
        }
        TriMesh::new(vertices, faces)
    }

    /// Axis-aligned box, 12 outward-facing triangles.
    pub fn cuboid(min: Vec3, max: Vec3) -> TriMesh {
        Self::cuboid_subdivided(min, max, 1)
    }

    /// Axis-aligned box whose faces are split into `n × n` quads (two triangles each),
    /// with welded vertices so that facet adjacency is available.
    pub fn cuboid_subdivided(min: Vec3, max: Vec3, n: usize) -> TriMesh {
        let n = n.max(1);
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut index: BTreeMap<[i64; 3], usize> = BTreeMap::new();
        let mut faces = Vec::new();
        let mut vid = |g: [usize; 3], vertices: &mut Vec<Vec3>| -> usize {
            let key = [g[0] as i64, g[1] as i64, g[2] as i64];
            *index.entry(key).or_insert_with(|| {
                let p = Vec3::new(
                    min.x + (max.x - min.x) * g[0] as f64 / n as f64,
                    min.y + (max.y - min.y) * g[1] as f64 / n as f64,
                    min.z + (max.z - min.z) * g[2] as f64 / n as f64,
                );
                vertices.push(p);
                vertices.len() - 1
            })
        };
        // (normal axis, side, u axis, v axis) with u × v along the outward normal
        let sides: [(usize, usize, usize, usize); 6] = [
            (0, 0, 2, 1),
            (0, n, 1, 2),
            (1, 0, 0, 2),
            (1, n, 2, 0),
            (2, 0, 1, 0),
            (2, n, 0, 1),
        ];
        for &(axis, side, ua, va) in &sides {
            for i in 0..n {
                for j in 0..n {
                    let g = |di: usize, dj: usize| {
                        let mut c = [0usize; 3];
                        c[axis] = side;
                        c[ua] = i + di;
                        c[va] = j + dj;
                        c
                    };
                    let a = vid(g(0, 0), &mut vertices);
                    let b = vid(g(1, 0), &mut vertices);
                    let c = vid(g(1, 1), &mut vertices);
                    let d = vid(g(0, 1), &mut vertices);
                    faces.push([a, b, c]);
                    faces.push([a, c, d]);
                }
            }
        }
        TriMesh::new(vertices, faces).expect("cuboid with positive extents")
    }

    /// Icosphere: `subdivisions = 0` gives the 20-face icosahedron, 1 gives 80 faces.
    pub fn icosphere(center: Vec3, radius: f64, subdivisions: usize) -> TriMesh {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
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
            let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                    vertices.len() - 1
                })
            };
            for f in &faces {
                let ab = midpoint(f[0], f[1], &mut vertices);
                let bc = midpoint(f[1], f[2], &mut vertices);
                let ca = midpoint(f[2], f[0], &mut vertices);
                next.push([f[0], ab, ca]);
                next.push([f[1], bc, ab]);
                next.push([f[2], ca, bc]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }
        let vertices = vertices.into_iter().map(|v| center + v * radius).collect();
        TriMesh::new(vertices, faces).expect("icosphere is well formed")
    }
}
