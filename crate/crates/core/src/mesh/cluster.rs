use std::collections::VecDeque;

use super::TriMesh;
use crate::math::Vec3;

/// A connected patch of facets with similar normals.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetCluster {
    /// Member faces in ascending order.
    pub face_indices: Vec<usize>,
    /// Area-weighted mean of the member normals, normalized.
    pub mean_normal: Vec3,
    pub total_area: f64,
}

/// Region growing over shared-edge adjacency.
///
/// Neighbouring faces join the same cluster when the angle between their normals is at most
/// `angle_tol`. Clusters are seeded from the lowest unassigned face id, so the output depends
/// only on face ordering.
pub fn cluster_facets(mesh: &TriMesh, angle_tol: f64) -> Vec<FacetCluster> {
    let n = mesh.face_count();
    let cos_tol = angle_tol.cos();
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n];
    for faces in mesh.edge_map().values() {
        for (i, &a) in faces.iter().enumerate() {
            for &b in &faces[i + 1..] {
                neighbours[a].push(b);
                neighbours[b].push(a);
            }
        }
    }
    for list in &mut neighbours {
        list.sort_unstable();
        list.dedup();
    }

    let mut assigned = vec![false; n];
    let mut clusters = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        queue.push_back(seed);
        let mut members = Vec::new();
        while let Some(f) = queue.pop_front() {
            members.push(f);
            for &g in &neighbours[f] {
                if !assigned[g] && mesh.normal(f).dot(&mesh.normal(g)) >= cos_tol {
                    assigned[g] = true;
                    queue.push_back(g);
                }
            }
        }
        members.sort_unstable();
        clusters.push(summarize(mesh, members));
    }
    clusters
}

fn summarize(mesh: &TriMesh, face_indices: Vec<usize>) -> FacetCluster {
    let mut sum = Vec3::zeros();
    let mut total_area = 0.0;
    for &f in &face_indices {
        let a = mesh.face_area(f);
        sum += mesh.normal(f) * a;
        total_area += a;
    }
    // closed surfaces average to zero; fall back to the seed normal
    let mean_normal = if sum.norm() > 1e-9 * total_area.max(1e-300) {
        sum.normalize()
    } else {
        mesh.normal(face_indices[0])
    };
    FacetCluster {
        face_indices,
        mean_normal,
        total_area,
    }
}
