//! Parallel-jaw grasp affordances: antipodal candidate generation, obstacle filtering and
//! snapping a demonstrated hand pose onto the nearest feasible grasp.
//!
//! Gripper frame convention: `x` is the approach axis (palm towards fingertips), `z` the
//! closing axis (from `contact_a` towards `contact_b`) and `y = z × x`. This mirrors the hand
//! frame, whose `x` points along the fingers and whose `z` runs from thumb to index.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hand::EndEffectorPose;
use crate::math::{check_unit, orthonormal_basis, quat_from_axes, quat_to_xyzw, Pose, Quat, Vec3};
use crate::mesh::collision::boxes_collide;
use crate::mesh::{
    check_gripper_collision, cluster_facets, ray_opposite_contact, sample_contact_points, ContactPoint, Obb,
    TriMesh, ANTIPODAL_TOL_DEG,
};

/// Parallel-jaw gripper geometry. Box extents are given in the gripper frame
/// (approach, lateral, closing).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GripperSpec {
    pub max_opening: f64,
    /// Distance from the palm face to the contact line, along the approach axis.
    pub finger_length: f64,
    pub finger_box: [f64; 3],
    pub palm_box: [f64; 3],
    pub grip_force_limit: f64,
    /// Gap between each finger pad and its contact before closing.
    pub finger_clearance: f64,
}

impl Default for GripperSpec {
    fn default() -> Self {
        GripperSpec {
            max_opening: 0.05,
            finger_length: 0.045,
            finger_box: [0.05, 0.02, 0.008],
            palm_box: [0.06, 0.06, 0.09],
            grip_force_limit: 130.0,
            finger_clearance: 0.002,
        }
    }
}

impl GripperSpec {
    pub fn validate(&self) -> Result<()> {
        let dims = self.finger_box.iter().chain(self.palm_box.iter());
        if !(self.max_opening > 0.0) || !(self.finger_length > 0.0) || dims.clone().any(|&d| !(d > 0.0)) {
            return Err(Error::validation("gripper extents must all be positive"));
        }
        if self.finger_clearance < 0.0 {
            return Err(Error::validation("finger clearance must be non-negative"));
        }
        Ok(())
    }

    /// Finger and palm boxes for a grasp at `pose` with the jaws set to `jaw_width`.
    pub fn boxes(&self, pose: &Pose, jaw_width: f64) -> [Obb; 3] {
        let axes: Matrix3<f64> = pose.orientation.to_rotation_matrix().into_inner();
        let [fx, fy, fz] = self.finger_box;
        let [px, py, pz] = self.palm_box;
        let finger_x = fx / 2.0 - self.finger_length;
        let finger_z = jaw_width / 2.0 + self.finger_clearance + fz / 2.0;
        let local = [
            (Vec3::new(finger_x, 0.0, -finger_z), Vec3::new(fx, fy, fz)),
            (Vec3::new(finger_x, 0.0, finger_z), Vec3::new(fx, fy, fz)),
            (Vec3::new(-self.finger_length - px / 2.0, 0.0, 0.0), Vec3::new(px, py, pz)),
        ];
        local.map(|(c, ext)| Obb {
            center: pose.transform_point(&c),
            axes,
            half_extents: ext / 2.0,
        })
    }

    /// Copy with every box extent scaled by `factor` (used for monotonicity checks).
    pub fn scaled_boxes(&self, factor: f64) -> GripperSpec {
        GripperSpec {
            finger_box: self.finger_box.map(|d| d * factor),
            palm_box: self.palm_box.map(|d| d * factor),
            ..*self
        }
    }
}

/// Contact sampling and orientation search resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingParams {
    pub cluster_angle_tol: f64,
    pub spacing: f64,
    pub min_boundary_dist: f64,
    pub approach_steps: usize,
    pub antipodal_tol_deg: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            cluster_angle_tol: 0.05,
            spacing: 0.01,
            min_boundary_dist: 0.005,
            approach_steps: 8,
            antipodal_tol_deg: ANTIPODAL_TOL_DEG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspCandidate {
    /// Midpoint of the two contacts.
    pub center: Vec3,
    pub orientation: Quat,
    pub jaw_width: f64,
    pub contact_a: ContactPoint,
    pub contact_b: ContactPoint,
}

impl GraspCandidate {
    /// Candidate for an antipodal pair, with the approach axis rotated `angle` radians about
    /// the closing axis from the pair's reference direction.
    pub fn from_pair(contact_a: ContactPoint, contact_b: ContactPoint, angle: f64) -> GraspCandidate {
        let closing = -contact_a.normal;
        let (u, v) = orthonormal_basis(&closing);
        let approach = u * angle.cos() + v * angle.sin();
        let lateral = closing.cross(&approach);
        GraspCandidate {
            center: (contact_a.position + contact_b.position) * 0.5,
            orientation: quat_from_axes(&approach, &lateral, &closing),
            jaw_width: (contact_b.position - contact_a.position).norm(),
            contact_a,
            contact_b,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.center, self.orientation)
    }

    pub fn approach_axis(&self) -> Vec3 {
        self.orientation * Vec3::x()
    }

    pub fn closing_axis(&self) -> Vec3 {
        self.orientation * Vec3::z()
    }
}

/// Antipodal grasp candidates on `target`, ordered by contact face id, then lattice position,
/// then approach rotation index. Candidates whose gripper boxes touch the target are dropped.
pub fn generate_grasp_candidates(target: &TriMesh, gripper: &GripperSpec, params: &SamplingParams) -> Vec<GraspCandidate> {
    let mut contacts: Vec<ContactPoint> = cluster_facets(target, params.cluster_angle_tol)
        .iter()
        .flat_map(|c| sample_contact_points(target, c, params.spacing, params.min_boundary_dist))
        .collect();
    contacts.sort_by_key(|c| c.face_id);

    let tol = params.antipodal_tol_deg.to_radians();
    let steps = params.approach_steps.max(1);
    let obstacles = std::slice::from_ref(target);
    contacts
        .par_iter()
        .map(|a| {
            let Some(hit) = ray_opposite_contact(target, a, tol) else {
                return Vec::new();
            };
            if hit.distance > gripper.max_opening {
                return Vec::new();
            }
            (0..steps)
                .map(|k| GraspCandidate::from_pair(*a, hit.contact, 2.0 * PI * k as f64 / steps as f64))
                .filter(|g| !boxes_collide(obstacles, &gripper.boxes(&g.pose(), g.jaw_width)))
                .collect()
        })
        .collect::<Vec<Vec<_>>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Keeps the candidates whose gripper does not touch any obstacle, preserving order.
pub fn filter_colliding_candidates(
    candidates: &[GraspCandidate],
    obstacles: &[TriMesh],
    gripper: &GripperSpec,
) -> Vec<GraspCandidate> {
    candidates
        .iter()
        .filter(|g| !check_gripper_collision(obstacles, g, gripper))
        .copied()
        .collect()
}

/// Positional distance (m) and orientation difference mapped linearly to [0, 1]
/// (0° ↦ 0, 180° ↦ 1) between a candidate and a hand pose.
pub fn grasp_similarity(candidate: &GraspCandidate, hand: &EndEffectorPose) -> Result<(f64, f64)> {
    check_unit(candidate.orientation.as_ref())?;
    check_unit(hand.pose.orientation.as_ref())?;
    let pos = (candidate.center - hand.pose.position).norm();
    let dot = candidate
        .orientation
        .as_ref()
        .coords
        .dot(&hand.pose.orientation.as_ref().coords)
        .abs()
        .clamp(0.0, 1.0);
    Ok((pos, 2.0 * dot.acos() / PI))
}

/// Acceptance thresholds for snapping a hand pose onto a grasp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilarityThresholds {
    pub max_pos_diff: f64,
    pub max_ori_diff: f64,
}

impl Default for SimilarityThresholds {
    fn default() -> Self {
        SimilarityThresholds {
            max_pos_diff: 0.05,
            max_ori_diff: 0.25,
        }
    }
}

impl SimilarityThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_pos_diff > 0.0) || !(self.max_ori_diff > 0.0) {
            return Err(Error::validation("similarity thresholds must be positive"));
        }
        Ok(())
    }
}

/// Index of the candidate the hand snaps to, if any.
///
/// Only candidates within both thresholds qualify; among them the lowest
/// `pos_diff + ori_diff * max_pos_diff` wins, earlier candidates winning ties.
pub fn snap_index(candidates: &[GraspCandidate], hand: &EndEffectorPose, th: &SimilarityThresholds) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let Ok((pos, ori)) = grasp_similarity(c, hand) else {
            continue;
        };
        if pos > th.max_pos_diff || ori > th.max_ori_diff {
            continue;
        }
        let score = pos + ori * th.max_pos_diff;
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, i));
        }
    }
    best.map(|(_, i)| i)
}

pub fn snap_to_grasp(
    candidates: &[GraspCandidate],
    hand: &EndEffectorPose,
    th: &SimilarityThresholds,
) -> Option<GraspCandidate> {
    snap_index(candidates, hand, th).map(|i| candidates[i])
}

/// JSON-friendly view of a candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub center: [f64; 3],
    /// (x, y, z, w)
    pub orientation: [f64; 4],
    pub jaw_width: f64,
    pub contact_a: ContactRecord,
    pub contact_b: ContactRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactRecord {
    pub position: [f64; 3],
    pub normal: [f64; 3],
    pub face_id: usize,
}

impl From<&ContactPoint> for ContactRecord {
    fn from(c: &ContactPoint) -> Self {
        ContactRecord {
            position: c.position.into(),
            normal: c.normal.into(),
            face_id: c.face_id,
        }
    }
}

impl From<&GraspCandidate> for CandidateRecord {
    fn from(g: &GraspCandidate) -> Self {
        CandidateRecord {
            center: g.center.into(),
            orientation: quat_to_xyzw(&g.orientation),
            jaw_width: g.jaw_width,
            contact_a: (&g.contact_a).into(),
            contact_b: (&g.contact_b).into(),
        }
    }
}
