//! Small rigid-body helpers on top of nalgebra.

use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Quat = UnitQuaternion<f64>;

/// Tolerance used when accepting externally supplied quaternions as unit-norm.
pub const UNIT_TOL: f64 = 1e-6;

/// Rigid pose: position in meters plus orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Quat,
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

impl Pose {
    pub fn new(position: Vec3, orientation: Quat) -> Self {
        Pose {
            position,
            orientation,
        }
    }

    pub fn identity() -> Self {
        Pose {
            position: Vec3::zeros(),
            orientation: Quat::identity(),
        }
    }

    pub fn from_position(position: Vec3) -> Self {
        Pose {
            position,
            orientation: Quat::identity(),
        }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.orientation * p + self.position
    }

    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.orientation * v
    }

    /// `self ∘ other`: express `other` (given in this frame) in the parent frame.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            position: self.transform_point(&other.position),
            orientation: self.orientation * other.orientation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.inverse();
        Pose {
            position: -(inv * self.position),
            orientation: inv,
        }
    }
}

/// Serialized pose layout shared by every file format: quaternion stored (x, y, z, w).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub position: [f64; 3],
    pub orientation: [f64; 4],
}

impl From<&Pose> for PoseRecord {
    fn from(p: &Pose) -> Self {
        PoseRecord {
            position: p.position.into(),
            orientation: quat_to_xyzw(&p.orientation),
        }
    }
}

impl PoseRecord {
    pub fn to_pose(&self) -> Result<Pose> {
        Ok(Pose {
            position: Vec3::from(self.position),
            orientation: quat_from_xyzw(self.orientation)?,
        })
    }
}

pub fn quat_to_xyzw(q: &Quat) -> [f64; 4] {
    let c = q.as_ref().coords;
    [c.x, c.y, c.z, c.w]
}

/// Builds a unit quaternion from (x, y, z, w), rejecting inputs whose norm is off by more than 1e-6.
pub fn quat_from_xyzw(xyzw: [f64; 4]) -> Result<Quat> {
    let q = Quaternion::new(xyzw[3], xyzw[0], xyzw[1], xyzw[2]);
    check_unit(&q)?;
    Ok(UnitQuaternion::new_normalize(q))
}

pub fn check_unit(q: &Quaternion<f64>) -> Result<()> {
    let n = q.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::validation(format!(
            "quaternion norm {n} is not within {UNIT_TOL} of 1"
        )));
    }
    Ok(())
}

/// Quaternion of the rotation vector `v` (axis times angle).
pub fn exp_rotvec(v: &Vec3) -> Quat {
    UnitQuaternion::from_scaled_axis(*v)
}

/// Rotation vector of `q`, taking the short way around (angle in [0, π]).
pub fn log_rotvec(q: &Quat) -> Vec3 {
    let mut c = q.as_ref().coords;
    if c.w < 0.0 {
        c = -c;
    }
    let v = Vec3::new(c.x, c.y, c.z);
    let s = v.norm();
    if s < 1e-300 {
        return Vec3::zeros();
    }
    let angle = 2.0 * s.atan2(c.w);
    v * (angle / s)
}

/// Rotation angle between two orientations, in [0, π], robust to the double cover.
pub fn angle_between(a: &Quat, b: &Quat) -> f64 {
    let d = a.as_ref().coords.dot(&b.as_ref().coords).abs().min(1.0);
    2.0 * d.acos()
}

/// Orientation whose rotation matrix has columns `x`, `y`, `z` (assumed orthonormal, right-handed).
pub fn quat_from_axes(x: &Vec3, y: &Vec3, z: &Vec3) -> Quat {
    let m = Matrix3::from_columns(&[*x, *y, *z]);
    UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m))
}

/// Shortest-path spherical interpolation; `t` in [0, 1].
pub fn slerp(a: &Quat, b: &Quat, t: f64) -> Quat {
    let qa = a.as_ref().coords;
    let mut qb = b.as_ref().coords;
    let mut d = qa.dot(&qb);
    if d < 0.0 {
        qb = -qb;
        d = -d;
    }
    let coords = if d > 1.0 - 1e-12 {
        qa * (1.0 - t) + qb * t
    } else {
        let theta = d.min(1.0).acos();
        let s = theta.sin();
        qa * (((1.0 - t) * theta).sin() / s) + qb * ((t * theta).sin() / s)
    };
    UnitQuaternion::new_normalize(Quaternion::from(coords))
}

/// Two unit vectors spanning the plane orthogonal to `n`, chosen deterministically.
///
/// The reference axis is the world axis least aligned with `n` (first one wins ties).
pub fn orthonormal_basis(n: &Vec3) -> (Vec3, Vec3) {
    let abs = n.abs();
    let axis = if abs.x <= abs.y && abs.x <= abs.z {
        Vec3::x()
    } else if abs.y <= abs.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let u = (axis - n * n.dot(&axis)).normalize();
    let v = n.cross(&u);
    (u, v)
}

pub fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}
