//! Gripper-versus-mesh collision: AABB broad phase, exact box/triangle SAT tests, and a
//! winding-number containment check for closed obstacles.

use nalgebra::Matrix3;

use super::TriMesh;
use crate::grasp::{GraspCandidate, GripperSpec};
use crate::math::Vec3;

const SAT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Aabb {
        let mut min = Vec3::repeat(f64::INFINITY);
        let mut max = Vec3::repeat(f64::NEG_INFINITY);
        for p in points {
            min = min.inf(p);
            max = max.sup(p);
        }
        Aabb { min, max }
    }

    /// Closed-interval overlap test (touching boxes overlap).
    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] + SAT_EPS && other.min[i] <= self.max[i] + SAT_EPS)
    }
}

/// Oriented box. `axes` columns are the box's unit axes in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub center: Vec3,
    pub axes: Matrix3<f64>,
    pub half_extents: Vec3,
}

impl Obb {
    pub fn aabb(&self) -> Aabb {
        let r = self.axes.abs() * self.half_extents;
        Aabb {
            min: self.center - r,
            max: self.center + r,
        }
    }

    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.axes.transpose() * (p - self.center)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let l = self.to_local(p);
        (0..3).all(|i| l[i].abs() <= self.half_extents[i] + SAT_EPS)
    }

    /// Exact separating-axis test against a triangle (13 candidate axes).
    pub fn intersects_triangle(&self, tri: &[Vec3; 3]) -> bool {
        let v = [self.to_local(&tri[0]), self.to_local(&tri[1]), self.to_local(&tri[2])];
        let h = self.half_extents;
        let e = [v[1] - v[0], v[2] - v[1], v[0] - v[2]];

        // box face normals
        for i in 0..3 {
            let lo = v[0][i].min(v[1][i]).min(v[2][i]);
            let hi = v[0][i].max(v[1][i]).max(v[2][i]);
            if lo > h[i] + SAT_EPS || hi < -h[i] - SAT_EPS {
                return false;
            }
        }
        // triangle normal
        let n = e[0].cross(&e[1]);
        if n.norm_squared() > 0.0 {
            let d = n.dot(&v[0]);
            let r = h.x * n.x.abs() + h.y * n.y.abs() + h.z * n.z.abs();
            if d.abs() > r + SAT_EPS * n.norm() {
                return false;
            }
        }
        // edge cross products
        let basis = [Vec3::x(), Vec3::y(), Vec3::z()];
        for edge in &e {
            for b in &basis {
                let axis = b.cross(edge);
                let len = axis.norm();
                if len < 1e-15 {
                    continue;
                }
                let p = [axis.dot(&v[0]), axis.dot(&v[1]), axis.dot(&v[2])];
                let lo = p[0].min(p[1]).min(p[2]);
                let hi = p[0].max(p[1]).max(p[2]);
                let r = h.x * axis.x.abs() + h.y * axis.y.abs() + h.z * axis.z.abs();
                if lo > r + SAT_EPS * len || hi < -r - SAT_EPS * len {
                    return false;
                }
            }
        }
        true
    }
}

/// True if any of `boxes` touches a triangle of an obstacle mesh or sits inside a closed one.
pub fn boxes_collide(obstacles: &[TriMesh], boxes: &[Obb]) -> bool {
    let box_bounds: Vec<Aabb> = boxes.iter().map(Obb::aabb).collect();
    for mesh in obstacles {
        let mesh_bounds = mesh.aabb();
        if !box_bounds.iter().any(|b| b.overlaps(&mesh_bounds)) {
            continue;
        }
        for f in 0..mesh.face_count() {
            let tri = mesh.triangle(f);
            let tb = Aabb::from_points(tri.iter());
            for (obb, bb) in boxes.iter().zip(&box_bounds) {
                if bb.overlaps(&tb) && obb.intersects_triangle(&tri) {
                    return true;
                }
            }
        }
        // a box touching no triangle is either wholly inside a closed mesh or wholly outside
        if mesh.is_closed() && boxes.iter().any(|b| mesh.winding_number(&b.center) > 0.5) {
            return true;
        }
    }
    false
}

/// True iff the gripper's finger and palm boxes, posed at `grasp`, intersect any obstacle
/// triangle or lie inside a closed obstacle.
pub fn check_gripper_collision(obstacles: &[TriMesh], grasp: &GraspCandidate, gripper: &GripperSpec) -> bool {
    boxes_collide(obstacles, &gripper.boxes(&grasp.pose(), grasp.jaw_width))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(center: Vec3) -> Obb {
        Obb {
            center,
            axes: Matrix3::identity(),
            half_extents: Vec3::repeat(0.5),
        }
    }

    #[test]
    fn triangle_inside_box_intersects() {
        let b = unit_box(Vec3::zeros());
        let t = [Vec3::new(-0.1, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0), Vec3::new(0.0, 0.1, 0.0)];
        assert!(b.intersects_triangle(&t));
    }

    #[test]
    fn large_triangle_through_box_intersects() {
        let b = unit_box(Vec3::zeros());
        let t = [Vec3::new(-5.0, -5.0, 0.0), Vec3::new(5.0, -5.0, 0.0), Vec3::new(0.0, 5.0, 0.0)];
        assert!(b.intersects_triangle(&t));
    }

    #[test]
    fn triangle_beside_box_corner_misses() {
        // triangle in the plane x + y = 1.1, just past the box edge at x + y = 1
        let b = unit_box(Vec3::zeros());
        let t = [Vec3::new(0.9, 0.2, -1.0), Vec3::new(0.2, 0.9, -1.0), Vec3::new(0.55, 0.55, 1.0)];
        assert!(!b.intersects_triangle(&t));
    }

    #[test]
    fn far_triangle_misses() {
        let b = unit_box(Vec3::zeros());
        let t = [Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 0.0)];
        assert!(!b.intersects_triangle(&t));
    }
}
