use std::collections::BTreeMap;

use super::{FacetCluster, TriMesh};
use crate::math::{orthonormal_basis, Vec3};

/// A candidate finger contact on the mesh surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPoint {
    pub position: Vec3,
    /// Outward unit normal of the face the point lies on.
    pub normal: Vec3,
    pub face_id: usize,
    /// Distance to the nearest cluster-boundary edge, in meters.
    pub boundary_distance: f64,
}

/// Grid sampling of a facet cluster.
///
/// A square lattice with pitch `spacing` is laid out in the plane orthogonal to the cluster's
/// mean normal, centred inside the cluster's projected bounding rectangle shrunk by
/// `min_boundary_dist`. Lattice nodes are projected along the mean normal onto the cluster
/// faces; nodes that miss the cluster or lie closer than `min_boundary_dist` to a boundary edge
/// are discarded. Output follows lattice order (first axis outer).
pub fn sample_contact_points(
    mesh: &TriMesh,
    cluster: &FacetCluster,
    spacing: f64,
    min_boundary_dist: f64,
) -> Vec<ContactPoint> {
    if !(spacing > 0.0) || !(min_boundary_dist >= 0.0) || cluster.face_indices.is_empty() {
        return Vec::new();
    }
    let n = cluster.mean_normal;
    let (u, v) = orthonormal_basis(&n);

    let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &f in &cluster.face_indices {
        for p in mesh.triangle(f) {
            umin = umin.min(p.dot(&u));
            umax = umax.max(p.dot(&u));
            vmin = vmin.min(p.dot(&v));
            vmax = vmax.max(p.dot(&v));
        }
    }
    let us = lattice(umin, umax, spacing, min_boundary_dist);
    let vs = lattice(vmin, vmax, spacing, min_boundary_dist);
    if us.is_empty() || vs.is_empty() {
        return Vec::new();
    }

    let boundary = boundary_edges(mesh, cluster);
    let mut out = Vec::new();
    for &a in &us {
        for &b in &vs {
            let Some((face_id, position)) = project_onto_cluster(mesh, cluster, &u, &v, &n, a, b) else {
                continue;
            };
            let boundary_distance = boundary
                .iter()
                .map(|(p, q)| point_segment_distance(&position, p, q))
                .fold(f64::INFINITY, f64::min);
            if boundary_distance + 1e-12 < min_boundary_dist {
                continue;
            }
            out.push(ContactPoint {
                position,
                normal: mesh.normal(face_id),
                face_id,
                boundary_distance,
            });
        }
    }
    out
}

/// Centred lattice coordinates on `[lo + margin, hi - margin]` with the given pitch.
pub(crate) fn lattice(lo: f64, hi: f64, pitch: f64, margin: f64) -> Vec<f64> {
    let usable = hi - lo - 2.0 * margin;
    if usable < -1e-12 {
        return Vec::new();
    }
    let usable = usable.max(0.0);
    let count = (usable / pitch + 1e-9).floor() as usize + 1;
    let offset = (usable - (count - 1) as f64 * pitch) / 2.0;
    (0..count).map(|i| lo + margin + offset + i as f64 * pitch).collect()
}

/// Edges used by exactly one face of the cluster.
fn boundary_edges(mesh: &TriMesh, cluster: &FacetCluster) -> Vec<(Vec3, Vec3)> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &f in &cluster.face_indices {
        let t = mesh.faces()[f];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let verts = mesh.vertices();
    count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|((a, b), _)| (verts[a], verts[b]))
        .collect()
}

fn project_onto_cluster(
    mesh: &TriMesh,
    cluster: &FacetCluster,
    u: &Vec3,
    v: &Vec3,
    n: &Vec3,
    a: f64,
    b: f64,
) -> Option<(usize, Vec3)> {
    let origin = u * a + v * b;
    for &f in &cluster.face_indices {
        let fnorm = mesh.normal(f);
        let denom = fnorm.dot(n);
        if denom.abs() < 1e-9 {
            continue;
        }
        let [p0, p1, p2] = mesh.triangle(f);
        let t = fnorm.dot(&(p0 - origin)) / denom;
        let hit = origin + n * t;
        let Some(bary) = barycentric(&hit, &p0, &p1, &p2) else {
            continue;
        };
        if bary.iter().all(|&w| w >= -1e-12) {
            let w = bary.map(|w| w.max(0.0));
            let s = w[0] + w[1] + w[2];
            let position = (p0 * w[0] + p1 * w[1] + p2 * w[2]) / s;
            return Some((f, position));
        }
    }
    None
}

/// Barycentric coordinates of `p` (assumed in the triangle's plane).
pub(crate) fn barycentric(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<[f64; 3]> {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = p - a;
    let d00 = v0.dot(&v0);
    let d01 = v0.dot(&v1);
    let d11 = v1.dot(&v1);
    let d20 = v2.dot(&v0);
    let d21 = v2.dot(&v1);
    let den = d00 * d11 - d01 * d01;
    if den.abs() < 1e-300 {
        return None;
    }
    let y = (d11 * d20 - d01 * d21) / den;
    let z = (d00 * d21 - d01 * d20) / den;
    Some([1.0 - y - z, y, z])
}

pub(crate) fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}
