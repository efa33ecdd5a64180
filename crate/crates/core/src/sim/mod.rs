//! Quasi-static plant: a part held to a base by snap-fit hooks and pulled by the gripper.
//!
//! Body poses are rigid displacements from the modelled placement, so meshes and hook anchors
//! are given once in world coordinates. Every step solves the static balance of the spring
//! network (grasp spring, hooks, and the base mount in single-arm mode) by damped Newton
//! iteration, then releases or breaks hooks and settles again.

mod trial;

pub use trial::{run_trial, ControllerSpec, DeviationPoint, NoiseModel, TrialResult};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grasp::{GraspCandidate, GripperSpec, SimilarityThresholds};
use crate::hand::{EndEffectorPose, FrameId, Grip};
use crate::hooks::SnapFitHook;
use crate::impedance::{ControlTarget, Wrench};
use crate::math::{exp_rotvec, log_rotvec, vec3, Pose, Vec3};
use crate::mesh::TriMesh;

const RELEASE_REL_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureLimits {
    /// Largest load in the jaw plane before the part slips out of the fingers (N).
    pub slip_force: f64,
    /// Largest total force the gripper mount survives (N).
    pub mount_break_force: f64,
    /// Reach of the arm around the robot base (m).
    pub workspace_radius: f64,
}

impl Default for FailureLimits {
    fn default() -> Self {
        FailureLimits {
            slip_force: 35.0,
            mount_break_force: 150.0,
            workspace_radius: 1.2,
        }
    }
}

impl FailureLimits {
    pub fn validate(&self) -> Result<()> {
        if [self.slip_force, self.mount_break_force, self.workspace_radius]
            .iter()
            .any(|v| !(*v > 0.0))
        {
            return Err(Error::validation("failure limits must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    Slip,
    MountBreak,
    Workspace,
    HookBroken,
    /// The hand never came close enough to a candidate while closing the gripper.
    NoGrasp,
    /// The balance solver failed; the trial was stopped.
    Aborted,
}

impl FailureReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureReason::Slip => "slip",
            FailureReason::MountBreak => "mount_break",
            FailureReason::Workspace => "workspace",
            FailureReason::HookBroken => "hook_broken",
            FailureReason::NoGrasp => "no_grasp",
            FailureReason::Aborted => "aborted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HookState {
    Engaged,
    Released,
    Broken,
}

/// Spring constants of the plant and solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicsParams {
    pub grasp_stiffness: f64,
    pub grasp_rot_stiffness: f64,
    /// Mount of the base to the table when no fixation arm holds it.
    pub base_stiffness: f64,
    pub base_rot_stiffness: f64,
    pub max_iterations: usize,
    /// Residual force/torque accepted as balanced (N, N·m).
    pub tolerance: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams {
            grasp_stiffness: 5000.0,
            grasp_rot_stiffness: 50.0,
            base_stiffness: 3000.0,
            base_rot_stiffness: 100.0,
            max_iterations: 50,
            tolerance: 1e-8,
        }
    }
}

impl PhysicsParams {
    pub fn validate(&self) -> Result<()> {
        let k = [
            self.grasp_stiffness,
            self.grasp_rot_stiffness,
            self.base_stiffness,
            self.base_rot_stiffness,
            self.tolerance,
        ];
        if k.iter().any(|v| !(*v > 0.0)) || self.max_iterations == 0 {
            return Err(Error::validation("physics stiffnesses, tolerance and iteration budget must be positive"));
        }
        Ok(())
    }
}

/// Settings used when replaying a demonstration against the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    /// Grasp candidates on the part the hand can snap to.
    pub candidates: Vec<GraspCandidate>,
    /// Grasp used by the fixation arm in dual-arm trials.
    pub fixation_candidate: Option<GraspCandidate>,
    pub thresholds: SimilarityThresholds,
    /// Camera depth axis in camera coordinates.
    pub depth_axis: Vec3,
    pub filter_alpha: f64,
    pub control_dt: f64,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            candidates: Vec::new(),
            fixation_candidate: None,
            thresholds: SimilarityThresholds::default(),
            depth_axis: Vec3::z(),
            filter_alpha: 0.5,
            control_dt: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub base: TriMesh,
    pub part: TriMesh,
    pub hooks: Vec<SnapFitHook>,
    pub hook_states: Vec<HookState>,
    /// Displacement of the part from its modelled placement.
    pub part_pose: Pose,
    /// Displacement of the base from its modelled placement.
    pub base_pose: Pose,
    /// When set, the fixation arm holds the base rigidly in place.
    pub fixation_grasp: Option<GraspCandidate>,
    pub disassembly_grasp: Option<GraspCandidate>,
    pub gripper: GripperSpec,
    pub limits: FailureLimits,
    pub physics: PhysicsParams,
    pub settings: SimSettings,
    grasp_offset: Pose,
    part_center: Vec3,
    base_anchor: Vec3,
}

/// Result of one plant update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Wrench the environment applies to the end effector after settling.
    pub wrench: Wrench,
    /// Largest wrench seen during the step, before hooks gave way.
    pub peak_wrench: Wrench,
    pub released: Vec<usize>,
    pub broken: Vec<usize>,
}

impl Scene {
    pub fn new(
        base: TriMesh,
        part: TriMesh,
        hooks: Vec<SnapFitHook>,
        gripper: GripperSpec,
        limits: FailureLimits,
        physics: PhysicsParams,
    ) -> Result<Scene> {
        limits.validate()?;
        physics.validate()?;
        gripper.validate()?;
        let bounds = part.aabb();
        for (i, h) in hooks.iter().enumerate() {
            h.validate()?;
            let inside = (0..3).all(|k| h.anchor[k] >= bounds.min[k] - 1e-9 && h.anchor[k] <= bounds.max[k] + 1e-9);
            if !inside {
                return Err(Error::validation(format!("hook {i} anchor lies outside the part bounds")));
            }
        }
        let bb = base.aabb();
        let base_anchor = Vec3::new((bb.min.x + bb.max.x) / 2.0, (bb.min.y + bb.max.y) / 2.0, bb.min.z);
        Ok(Scene {
            part_center: part.centroid(),
            base_anchor,
            hook_states: vec![HookState::Engaged; hooks.len()],
            base,
            part,
            hooks,
            part_pose: Pose::identity(),
            base_pose: Pose::identity(),
            fixation_grasp: None,
            disassembly_grasp: None,
            gripper,
            limits,
            physics,
            settings: SimSettings::default(),
            grasp_offset: Pose::identity(),
        })
    }

    pub fn base_locked(&self) -> bool {
        self.fixation_grasp.is_some()
    }

    pub fn released_count(&self) -> usize {
        self.hook_states.iter().filter(|s| **s == HookState::Released).count()
    }

    /// Rigidly attaches the gripper to the part at `grasp`, with the spring relaxed.
    pub fn attach(&mut self, grasp: GraspCandidate) {
        self.grasp_offset = self.part_pose.inverse().compose(&grasp.pose());
        self.disassembly_grasp = Some(grasp);
    }

    pub fn detach(&mut self) {
        self.disassembly_grasp = None;
    }

    /// Current pose of the gripper frame carried by the part.
    pub fn grip_frame(&self) -> Option<Pose> {
        self.disassembly_grasp.map(|_| self.part_pose.compose(&self.grasp_offset))
    }

    /// World pose of the base's reference frame (mount point, displaced orientation).
    pub fn base_world_pose(&self) -> Pose {
        Pose::new(self.base_pose.transform_point(&self.base_anchor), self.base_pose.orientation)
    }

    /// World pose of the part's reference frame (centroid, displaced orientation).
    pub fn part_world_pose(&self) -> Pose {
        Pose::new(self.part_pose.transform_point(&self.part_center), self.part_pose.orientation)
    }

    fn engaged(&self, i: usize) -> bool {
        self.hook_states[i] == HookState::Engaged
    }

    /// Per-hook deflection along the extraction axis and spring force on the part.
    fn hook_load(&self, hook: &SnapFitHook, part: &Pose, base: &Pose) -> (f64, Vec3, Vec3, Vec3) {
        let p = part.transform_point(&hook.anchor);
        let b = base.transform_point(&hook.anchor);
        let e = base.orientation * hook.extraction_axis;
        let d = p - b;
        let s = d.dot(&e);
        let f = -e * (hook.axial_stiffness() * s) - (d - e * s) * hook.k_in;
        (s, f, p, b)
    }

    fn loads(&self, part: &Pose, base: &Pose, target: Option<&Pose>) -> Loads {
        let cp = part.transform_point(&self.part_center);
        let cb = base.transform_point(&self.base_anchor);
        let mut l = Loads::default();
        for (i, h) in self.hooks.iter().enumerate() {
            if !self.engaged(i) {
                continue;
            }
            let (_, f, p, b) = self.hook_load(h, part, base);
            let rel = log_rotvec(&(part.orientation * base.orientation.inverse()));
            let t = -rel * h.k_rot;
            l.part_f += f;
            l.part_t += (p - cp).cross(&f) + t;
            l.base_f -= f;
            l.base_t += (b - cb).cross(&(-f)) - t;
        }
        if let (Some(target), Some(_)) = (target, self.disassembly_grasp) {
            let a = part.compose(&self.grasp_offset);
            let f = (target.position - a.position) * self.physics.grasp_stiffness;
            let t = log_rotvec(&(target.orientation * a.orientation.inverse())) * self.physics.grasp_rot_stiffness;
            l.part_f += f;
            l.part_t += (a.position - cp).cross(&f) + t;
            l.ee = [-f.x, -f.y, -f.z, -t.x, -t.y, -t.z];
        }
        if !self.base_locked() {
            l.base_f -= (cb - self.base_anchor) * self.physics.base_stiffness;
            l.base_t -= log_rotvec(&base.orientation) * self.physics.base_rot_stiffness;
        }
        l
    }

    fn part_free(&self, target: Option<&Pose>) -> bool {
        (target.is_some() && self.disassembly_grasp.is_some()) || self.hook_states.contains(&HookState::Engaged)
    }

    /// Solves the static balance for the current hook states and stores the settled poses.
    fn settle(&mut self, target: Option<&Pose>) -> Result<Loads> {
        let solve_part = self.part_free(target);
        let solve_base = !self.base_locked();
        let dims = 6 * (solve_part as usize + solve_base as usize);
        let (mut part, mut base) = (self.part_pose, self.base_pose);
        let residual = |part: &Pose, base: &Pose| -> DVector<f64> {
            let l = self.loads(part, base, target);
            let mut r = Vec::with_capacity(dims);
            if solve_part {
                r.extend(l.part_f.iter().chain(l.part_t.iter()));
            }
            if solve_base {
                r.extend(l.base_f.iter().chain(l.base_t.iter()));
            }
            DVector::from_vec(r)
        };
        let apply = |part: &Pose, base: &Pose, delta: &DVector<f64>| -> (Pose, Pose) {
            let mut k = 0;
            let mut p = *part;
            let mut b = *base;
            if solve_part {
                p = perturb(part, &part.transform_point(&self.part_center), &delta.rows(0, 6));
                k = 6;
            }
            if solve_base {
                b = perturb(base, &base.transform_point(&self.base_anchor), &delta.rows(k, 6));
            }
            (p, b)
        };

        if dims > 0 {
            let mut r = residual(&part, &base);
            let mut norm = r.amax();
            let mut iterations = 0;
            while norm > self.physics.tolerance {
                if iterations == self.physics.max_iterations {
                    return Err(Error::Convergence {
                        iterations,
                        residual: norm,
                    });
                }
                iterations += 1;
                let mut jac = DMatrix::zeros(dims, dims);
                for j in 0..dims {
                    let mut d = DVector::zeros(dims);
                    d[j] = FD_STEP;
                    let (pp, bp) = apply(&part, &base, &d);
                    d[j] = -FD_STEP;
                    let (pm, bm) = apply(&part, &base, &d);
                    let col = (residual(&pp, &bp) - residual(&pm, &bm)) / (2.0 * FD_STEP);
                    jac.set_column(j, &col);
                }
                let Some(step) = jac.lu().solve(&(-&r)) else {
                    return Err(Error::Convergence {
                        iterations,
                        residual: norm,
                    });
                };
                let mut alpha = 1.0;
                loop {
                    let (p, b) = apply(&part, &base, &(&step * alpha));
                    let rn = residual(&p, &b);
                    if rn.amax() < norm || alpha < 1e-6 {
                        part = p;
                        base = b;
                        r = rn;
                        break;
                    }
                    alpha *= 0.5;
                }
                norm = r.amax();
            }
        }
        self.part_pose = part;
        self.base_pose = base;
        Ok(self.loads(&part, &base, target))
    }

    /// Deflection along the extraction axis and load magnitude of every hook at the current poses.
    pub fn hook_deflections(&self) -> Vec<(f64, f64)> {
        self.hooks
            .iter()
            .map(|h| {
                let (s, f, _, _) = self.hook_load(h, &self.part_pose, &self.base_pose);
                (s, f.norm())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Loads {
    part_f: Vec3,
    part_t: Vec3,
    base_f: Vec3,
    base_t: Vec3,
    ee: Wrench,
}

/// Moves `pose` by `delta = (translation, rotation vector)`, rotating about `center`.
fn perturb(pose: &Pose, center: &Vec3, delta: &nalgebra::DVectorView<f64>) -> Pose {
    let dt = Vec3::new(delta[0], delta[1], delta[2]);
    let dr = exp_rotvec(&Vec3::new(delta[3], delta[4], delta[5]));
    Pose::new(dr * (pose.position - center) + center + dt, dr * pose.orientation)
}

fn force_norm(w: &Wrench) -> f64 {
    vec3([w[0], w[1], w[2]]).norm()
}

/// Advances the plant by one control tick.
///
/// With the gripper closed on an attached grasp, the part is drawn toward the reference pose
/// through the grasp spring; with the gripper open the grasp is let go. After the balance is
/// solved, hooks deflected to their release point snap free one at a time (largest relative
/// deflection first) and hooks loaded beyond their break force fail, each followed by a new
/// settle.
pub fn step_scene(scene: &mut Scene, target: &ControlTarget, grip: Grip, dt: f64) -> Result<StepOutcome> {
    if !(dt > 0.0) {
        return Err(Error::validation("dt must be positive"));
    }
    if target.reference.frame != FrameId::Robot {
        return Err(Error::validation("control target must be in the robot frame"));
    }
    if grip == Grip::Open {
        scene.detach();
    }
    let reference = target.reference.pose;
    let drive = scene.disassembly_grasp.map(|_| &reference);

    let mut loads = scene.settle(drive)?;
    let mut peak = loads.ee;
    let mut released = Vec::new();
    let mut broken = Vec::new();
    loop {
        let mut snap: Option<(f64, usize)> = None;
        let mut overload = None;
        for (i, h) in scene.hooks.iter().enumerate() {
            if !scene.engaged(i) {
                continue;
            }
            let (s, f, _, _) = scene.hook_load(h, &scene.part_pose, &scene.base_pose);
            let ratio = s / h.release_deflection;
            if ratio >= 1.0 - RELEASE_REL_TOL {
                if snap.is_none_or(|(r, _)| ratio > r) {
                    snap = Some((ratio, i));
                }
            } else if f.norm() > h.break_force && overload.is_none() {
                overload = Some(i);
            }
        }
        if let Some((_, i)) = snap {
            scene.hook_states[i] = HookState::Released;
            released.push(i);
        } else if let Some(i) = overload {
            scene.hook_states[i] = HookState::Broken;
            broken.push(i);
        } else {
            break;
        }
        loads = scene.settle(drive)?;
        if force_norm(&loads.ee) > force_norm(&peak) {
            peak = loads.ee;
        }
    }
    Ok(StepOutcome {
        wrench: loads.ee,
        peak_wrench: peak,
        released,
        broken,
    })
}

/// First limit exceeded by `wrench` at `ee_pose`, checked in the order slip, mount, workspace.
///
/// Slip compares the force component lying in the jaw plane (orthogonal to the closing axis
/// of `ee_pose`) with `slip_force`; the mount check uses the full force magnitude.
pub fn detect_failure(scene: &Scene, wrench: &Wrench, ee_pose: &EndEffectorPose) -> Option<FailureReason> {
    let f = vec3([wrench[0], wrench[1], wrench[2]]);
    let closing = ee_pose.pose.orientation * Vec3::z();
    let tangential = (f - closing * f.dot(&closing)).norm();
    if tangential > scene.limits.slip_force {
        Some(FailureReason::Slip)
    } else if f.norm() > scene.limits.mount_break_force {
        Some(FailureReason::MountBreak)
    } else if ee_pose.pose.position.norm() > scene.limits.workspace_radius {
        Some(FailureReason::Workspace)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impedance::ControlMode;
    use crate::math::Quat;

    fn hook(anchor: Vec3, theta: f64) -> SnapFitHook {
        SnapFitHook {
            anchor,
            theta,
            extraction_axis: -Vec3::x(),
            k_in: 20000.0,
            k_out: 3000.0,
            k_rot: 300.0,
            release_deflection: 0.002,
            break_force: 1000.0,
        }
    }

    fn scene(hooks: Vec<SnapFitHook>) -> Scene {
        let base = TriMesh::cuboid(Vec3::new(0.5, -0.2, 0.0), Vec3::new(0.8, 0.2, 0.3));
        let part = TriMesh::cuboid(Vec3::new(0.48, -0.18, 0.02), Vec3::new(0.5, 0.18, 0.28));
        Scene::new(base, part, hooks, GripperSpec::default(), FailureLimits::default(), PhysicsParams::default()).unwrap()
    }

    fn grasp_at(center: Vec3) -> GraspCandidate {
        let c = crate::mesh::ContactPoint {
            position: center - Vec3::y() * 0.005,
            normal: -Vec3::y(),
            face_id: 0,
            boundary_distance: 0.01,
        };
        let d = crate::mesh::ContactPoint {
            position: center + Vec3::y() * 0.005,
            normal: Vec3::y(),
            face_id: 1,
            boundary_distance: 0.01,
        };
        GraspCandidate::from_pair(c, d, 0.0)
    }

    fn target(pose: Pose) -> ControlTarget {
        let p = EndEffectorPose {
            pose,
            frame: FrameId::Robot,
        };
        ControlTarget {
            nominal: p,
            reference: p,
            mode: ControlMode::PositionOnly,
        }
    }

    fn four_hooks() -> Vec<SnapFitHook> {
        [(0.15, 0.05), (0.15, 0.25), (-0.15, 0.05), (-0.15, 0.25)]
            .iter()
            .map(|&(y, z)| hook(Vec3::new(0.5, y, z), 0.4))
            .collect()
    }

    #[test]
    fn equilibrium_without_hooks_is_stationary() {
        let mut s = scene(Vec::new());
        s.fixation_grasp = Some(grasp_at(Vec3::new(0.82, 0.0, 0.15)));
        let g = grasp_at(Vec3::new(0.47, 0.0, 0.15));
        s.attach(g);
        let out = step_scene(&mut s, &target(g.pose()), Grip::Close, 1e-3).unwrap();
        assert_eq!(out.wrench, [0.0; 6]);
        assert_eq!(s.part_pose, Pose::identity());
    }

    #[test]
    fn series_spring_release_point() {
        let h = hook(Vec3::new(0.5, 0.0, 0.15), 0.0);
        let mut s = scene(vec![h]);
        s.fixation_grasp = Some(grasp_at(Vec3::new(0.82, 0.0, 0.15)));
        let g = grasp_at(Vec3::new(0.5, 0.0, 0.15));
        s.attach(g);
        let shift = h.release_deflection * (1.0 + h.k_out / s.physics.grasp_stiffness);
        let mut pose = g.pose();
        pose.position += h.extraction_axis * shift;
        let out = step_scene(&mut s, &target(pose), Grip::Close, 1e-3).unwrap();
        assert_eq!(out.released, vec![0]);

        let mut s = scene(vec![h]);
        s.fixation_grasp = Some(grasp_at(Vec3::new(0.82, 0.0, 0.15)));
        s.attach(g);
        pose.position = g.center + h.extraction_axis * shift * 0.99;
        let out = step_scene(&mut s, &target(pose), Grip::Close, 1e-3).unwrap();
        assert!(out.released.is_empty());
    }

    #[test]
    fn released_hooks_stay_released() {
        let h = hook(Vec3::new(0.5, 0.0, 0.15), 0.0);
        let mut s = scene(vec![h]);
        s.fixation_grasp = Some(grasp_at(Vec3::new(0.82, 0.0, 0.15)));
        let g = grasp_at(Vec3::new(0.5, 0.0, 0.15));
        s.attach(g);
        let mut pose = g.pose();
        pose.position += h.extraction_axis * 0.01;
        assert_eq!(step_scene(&mut s, &target(pose), Grip::Close, 1e-3).unwrap().released, vec![0]);
        for push in [0.0, -0.002, -0.005] {
            pose.position = g.center + h.extraction_axis * push;
            let out = step_scene(&mut s, &target(pose), Grip::Close, 1e-3).unwrap();
            assert!(out.released.is_empty());
            assert_eq!(s.hook_states[0], HookState::Released);
        }
    }

    #[test]
    fn fixation_suppresses_rotation() {
        let g = grasp_at(Vec3::new(0.46, 0.0, 0.15));
        let mut pose = g.pose();
        pose.position.z += 0.004;
        let rotation = |locked: bool| {
            let mut s = scene(four_hooks());
            if locked {
                s.fixation_grasp = Some(grasp_at(Vec3::new(0.82, 0.0, 0.15)));
            }
            s.attach(g);
            step_scene(&mut s, &target(pose), Grip::Close, 1e-3).unwrap();
            s.part_pose.orientation.angle()
        };
        let (single, dual) = (rotation(false), rotation(true));
        assert!(single > 0.0);
        assert!(dual * 10.0 <= single, "single {single} dual {dual}");
    }

    #[test]
    fn open_grip_transmits_nothing() {
        let mut s = scene(four_hooks());
        let g = grasp_at(Vec3::new(0.46, 0.0, 0.15));
        s.attach(g);
        let mut pose = g.pose();
        pose.position.x -= 0.05;
        let out = step_scene(&mut s, &target(pose), Grip::Open, 1e-3).unwrap();
        assert_eq!(out.wrench, [0.0; 6]);
        assert!(s.disassembly_grasp.is_none());
    }

    #[test]
    fn failure_priority() {
        let s = scene(Vec::new());
        let ee = EndEffectorPose {
            pose: Pose::identity(),
            frame: FrameId::Robot,
        };
        assert_eq!(detect_failure(&s, &[0.0; 6], &ee), None);
        let slip = s.limits.slip_force * 1.01;
        assert_eq!(detect_failure(&s, &[slip, 0.0, 0.0, 0.0, 0.0, 0.0], &ee), Some(FailureReason::Slip));
        // along the closing axis the jaws hold; only the mount limit applies
        assert_eq!(detect_failure(&s, &[0.0, 0.0, slip, 0.0, 0.0, 0.0], &ee), None);
        let big = s.limits.mount_break_force * 2.0;
        assert_eq!(detect_failure(&s, &[big, 0.0, 0.0, 0.0, 0.0, 0.0], &ee), Some(FailureReason::Slip));
        assert_eq!(detect_failure(&s, &[0.0, 0.0, big, 0.0, 0.0, 0.0], &ee), Some(FailureReason::MountBreak));
        let far = EndEffectorPose {
            pose: Pose::new(Vec3::new(2.0, 0.0, 0.0), Quat::identity()),
            frame: FrameId::Robot,
        };
        assert_eq!(detect_failure(&s, &[0.0; 6], &far), Some(FailureReason::Workspace));
    }
}
