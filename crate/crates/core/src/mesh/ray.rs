use super::sample::point_segment_distance;
use super::{ContactPoint, TriMesh};
use crate::math::Vec3;

/// Default tolerance (degrees) on the angle between opposing contact normals and π.
pub const ANTIPODAL_TOL_DEG: f64 = 10.0;

const T_MIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub contact: ContactPoint,
    /// Distance travelled along the ray, i.e. the jaw separation of the pair.
    pub distance: f64,
}

/// Casts a ray from `point` along its inward direction (−normal) and returns the first surface
/// hit, provided that face opposes the starting normal within `antipodal_tol` radians.
///
/// If the first face hit is not antipodal there is no valid partner and `None` is returned.
/// The hit's `boundary_distance` is its distance to the nearest edge of the hit triangle.
pub fn ray_opposite_contact(mesh: &TriMesh, point: &ContactPoint, antipodal_tol: f64) -> Option<RayHit> {
    let dir = -point.normal;
    let origin = point.position;
    let mut best: Option<(f64, usize)> = None;
    for f in 0..mesh.face_count() {
        let [a, b, c] = mesh.triangle(f);
        if let Some(t) = moller_trumbore(&origin, &dir, &a, &b, &c) {
            if t > T_MIN && best.is_none_or(|(bt, _)| t < bt - 1e-12) {
                best = Some((t, f));
            }
        }
    }
    let (t, face_id) = best?;
    let normal = mesh.normal(face_id);
    if normal.dot(&point.normal) > -antipodal_tol.cos() {
        return None;
    }
    let position = origin + dir * t;
    let [a, b, c] = mesh.triangle(face_id);
    let boundary_distance = point_segment_distance(&position, &a, &b)
        .min(point_segment_distance(&position, &b, &c))
        .min(point_segment_distance(&position, &c, &a));
    Some(RayHit {
        contact: ContactPoint {
            position,
            normal,
            face_id,
            boundary_distance,
        },
        distance: t,
    })
}

fn moller_trumbore(o: &Vec3, d: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-15 {
        return None;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(&p) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = d.dot(&q) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    Some(e2.dot(&q) * inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> f64 {
        ANTIPODAL_TOL_DEG.to_radians()
    }

    #[test]
    fn cube_face_centre_hits_opposite_face() {
        let m = TriMesh::cuboid(Vec3::zeros(), Vec3::new(0.1, 0.1, 0.1));
        let p = ContactPoint {
            position: Vec3::new(0.1, 0.05, 0.05),
            normal: Vec3::x(),
            face_id: 0,
            boundary_distance: 0.05,
        };
        let hit = ray_opposite_contact(&m, &p, tol()).unwrap();
        assert!((hit.distance - 0.1).abs() < 1e-12);
        assert!((hit.contact.position - Vec3::new(0.0, 0.05, 0.05)).norm() < 1e-12);
        assert!((hit.contact.normal + Vec3::x()).norm() < 1e-12);
    }

    #[test]
    fn open_shell_has_no_partner() {
        let v = vec![Vec3::zeros(), Vec3::x(), Vec3::new(1.0, 1.0, 0.0), Vec3::y()];
        let m = TriMesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        let p = ContactPoint {
            position: Vec3::new(0.5, 0.4, 0.0),
            normal: Vec3::z(),
            face_id: 0,
            boundary_distance: 0.4,
        };
        assert!(ray_opposite_contact(&m, &p, tol()).is_none());
    }

    #[test]
    fn non_antipodal_first_hit_is_rejected() {
        // wedge: the ray from the slanted face hits the base at 45 degrees
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let m = TriMesh::new(v, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]).unwrap();
        let n = Vec3::new(1.0, 1.0, 1.0).normalize();
        let p = ContactPoint {
            position: Vec3::new(1.0, 1.0, 1.0) / 3.0,
            normal: n,
            face_id: 3,
            boundary_distance: 0.1,
        };
        assert!(ray_opposite_contact(&m, &p, tol()).is_none());
    }
}
