//! Replays a demonstrated hand trajectory against the scene.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{detect_failure, step_scene, FailureReason, Scene};
use crate::grasp::snap_to_grasp;
use crate::hand::{build_hand_frame, camera_to_robot, Calibration, EndEffectorPose, FrameId, Grip, HandKeypoints, KeypointSmoother};
use crate::impedance::{ControlMode, Controller, ImpedanceParams, Wrench};
use crate::math::{Pose, Vec3};
use crate::metrics::{deviation_terms, PoseSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerSpec {
    pub mode: ControlMode,
    pub params: ImpedanceParams,
}

/// Zero-mean Gaussian tracking noise on the hand position: every frame, one offset is drawn
/// per coordinate and added to all keypoints, so the hand shifts without changing shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub seed: u64,
    /// Standard deviation per coordinate (m).
    pub sigma: f64,
}

/// Object pose and its deviation from the first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationPoint {
    pub t: f64,
    pub pose: Pose,
    pub deviation: f64,
    pub pos_term: f64,
    pub ang_term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub success: bool,
    pub failure: Option<FailureReason>,
    /// Pose of the disassembled object (the base) at every trajectory frame.
    pub deviation_series: Vec<DeviationPoint>,
    pub released_hooks: usize,
    pub total_hooks: usize,
    pub duration: f64,
    /// Time at which the last hook released, if it did.
    pub completion_time: Option<f64>,
    /// Largest grasp force magnitude over the trial (N).
    pub peak_contact_force: f64,
}

impl TrialResult {
    pub fn max_deviation(&self) -> f64 {
        self.deviation_series.iter().map(|d| d.deviation).fold(0.0, f64::max)
    }
}

struct Grasped {
    hand_at_snap: Pose,
    grasp_pose: Pose,
}

/// Runs one demonstration: noise, keypoint smoothing, hand frame, calibration, snapping to a
/// grasp on the first closed-grip frame near a candidate, then hybrid or position control of
/// the plant at `scene.settings.control_dt` with the nominal target held between frames.
///
/// After the grasp, the nominal gripper pose is the snapped grasp moved by the hand's motion
/// since the snap. The trial stops at the first failure and otherwise replays the whole
/// trajectory. A solver failure ends the trial as [`FailureReason::Aborted`].
pub fn run_trial(
    scene: &Scene,
    trajectory: &[HandKeypoints],
    cal: &Calibration,
    controller: &ControllerSpec,
    dual_arm: bool,
    noise: &NoiseModel,
) -> TrialResult {
    let mut scene = scene.clone();
    scene.hook_states.iter_mut().for_each(|s| *s = super::HookState::Engaged);
    scene.disassembly_grasp = None;
    scene.fixation_grasp = if dual_arm {
        scene.fixation_grasp.or(scene.settings.fixation_candidate)
    } else {
        None
    };
    let mut result = TrialResult {
        success: false,
        failure: None,
        deviation_series: Vec::new(),
        released_hooks: 0,
        total_hooks: scene.hooks.len(),
        duration: match (trajectory.first(), trajectory.last()) {
            (Some(a), Some(b)) => b.timestamp - a.timestamp,
            _ => 0.0,
        },
        completion_time: None,
        peak_contact_force: 0.0,
    };
    if dual_arm && scene.fixation_grasp.is_none() {
        result.failure = Some(FailureReason::Aborted);
        return result;
    }
    match replay(&mut scene, trajectory, cal, controller, noise, &mut result) {
        Ok(true) => {}
        Ok(false) => result.failure = Some(FailureReason::NoGrasp),
        Err(reason) => result.failure = Some(reason),
    }
    result.released_hooks = scene.released_count();
    result.success = result.failure.is_none() && result.released_hooks == result.total_hooks;
    result
}

fn replay(
    scene: &mut Scene,
    trajectory: &[HandKeypoints],
    cal: &Calibration,
    spec: &ControllerSpec,
    noise: &NoiseModel,
    result: &mut TrialResult,
) -> std::result::Result<bool, FailureReason> {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, noise.sigma.max(0.0)).map_err(|_| FailureReason::Aborted)?;
    let mut jitter = || Vec3::new(normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng));
    let mut smoother = KeypointSmoother::new(scene.settings.filter_alpha);
    let mut controller = Controller::new(spec.mode, spec.params).map_err(|_| FailureReason::Aborted)?;
    let mut grasped: Option<Grasped> = None;
    let mut hand: Option<Pose> = None;
    let mut wrench: Wrench = [0.0; 6];
    let mut first: Option<PoseSample> = None;

    for (k, raw) in trajectory.iter().enumerate() {
        let shift = jitter();
        let noisy = HandKeypoints {
            wrist: raw.wrist + shift,
            index_base: raw.index_base + shift,
            thumb_base: raw.thumb_base + shift,
            ..*raw
        };
        if let Some(kp) = smoother.push(&noisy) {
            if let Some(p) = robot_hand_pose(&kp, scene, cal) {
                hand = Some(p);
            }
        }

        let object = PoseSample::new(raw.timestamp, &scene.base_world_pose());
        let origin = *first.get_or_insert(object);
        let (pos_term, ang_term) = deviation_terms(&object, &origin).map_err(|_| FailureReason::Aborted)?;
        result.deviation_series.push(DeviationPoint {
            t: raw.timestamp,
            pose: object.pose(),
            deviation: pos_term + ang_term,
            pos_term,
            ang_term,
        });

        if grasped.is_none() && raw.grip == Grip::Close {
            if let Some(h) = hand {
                let view = EndEffectorPose {
                    pose: h,
                    frame: FrameId::Robot,
                };
                if let Some(c) = snap_to_grasp(&scene.settings.candidates, &view, &scene.settings.thresholds) {
                    scene.attach(c);
                    grasped = Some(Grasped {
                        hand_at_snap: h,
                        grasp_pose: c.pose(),
                    });
                }
            }
        }
        if grasped.is_some() && raw.grip == Grip::Open {
            scene.detach();
        }
        let (Some(g), Some(h), Some(next)) = (&grasped, hand, trajectory.get(k + 1)) else {
            continue;
        };
        if scene.disassembly_grasp.is_none() {
            continue;
        }
        let nominal = EndEffectorPose {
            pose: Pose::new(
                g.grasp_pose.position + (h.position - g.hand_at_snap.position),
                h.orientation * g.hand_at_snap.orientation.inverse() * g.grasp_pose.orientation,
            ),
            frame: FrameId::Robot,
        };
        let span = next.timestamp - raw.timestamp;
        if !(span > 0.0) {
            continue;
        }
        let steps = ((span / scene.settings.control_dt) - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for i in 0..steps {
            let target = controller.update(&nominal, &wrench, dt).map_err(|_| FailureReason::Aborted)?;
            let out = step_scene(scene, &target, Grip::Close, dt).map_err(|e| {
                log::debug!("trial aborted: {e}");
                FailureReason::Aborted
            })?;
            wrench = out.wrench;
            let peak = Vec3::new(out.peak_wrench[0], out.peak_wrench[1], out.peak_wrench[2]).norm();
            result.peak_contact_force = result.peak_contact_force.max(peak);
            if !out.broken.is_empty() {
                return Err(FailureReason::HookBroken);
            }
            if result.completion_time.is_none() && scene.released_count() == scene.hooks.len() {
                result.completion_time = Some(raw.timestamp + dt * (i + 1) as f64);
            }
            if let Some(reason) = detect_failure(scene, &out.peak_wrench, &target.reference) {
                return Err(reason);
            }
        }
    }
    Ok(grasped.is_some())
}

fn robot_hand_pose(kp: &HandKeypoints, scene: &Scene, cal: &Calibration) -> Option<Pose> {
    let cam = build_hand_frame(kp, &scene.settings.depth_axis).ok()?;
    camera_to_robot(&cam, cal).ok().map(|p| p.pose)
}
