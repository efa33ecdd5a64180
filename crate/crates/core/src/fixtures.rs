//! Reference scene: a cover plate clipped onto a chassis by four snap-fit hooks, a camera
//! looking down on it, and scripted teleoperation demonstrations.
//!
//! Robot frame: z up, robot base at the origin. The cover sits on the chassis front face
//! (x = 0.50) and is pulled off along −x by a handle fin.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::config::{build_scene, write_calibration, SceneConfig};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, MethodSpec};
use crate::grasp::{GripperSpec, SamplingParams, SimilarityThresholds};
use crate::hand::{write_trajectory, Calibration, Grip, HandKeypoints};
use crate::hooks::{DirectionSearch, HookRecord};
use crate::impedance::ImpedanceParams;
use crate::math::{Quat, Vec3};
use crate::mesh::{write_stl_ascii, TriMesh};
use crate::sim::{FailureLimits, PhysicsParams, Scene};

/// Frame rate of the scripted demonstrations (Hz).
pub const FRAME_RATE: f64 = 30.0;
/// Robot-frame point the demonstrations grasp.
pub const GRASP_POINT: [f64; 3] = [0.455, 0.0, 0.151];
/// Distance the cover is pulled.
pub const PULL_DISTANCE: f64 = 0.12;
/// Start and duration of the pull stroke (s).
pub const PULL_START: f64 = 2.0;
pub const PULL_DURATION: f64 = 1.5;
/// Size of the target jump in the perturbed demonstration.
pub const JUMP_DISTANCE: f64 = 0.2;
/// Tracking noise used by the reference experiment (m).
pub const NOISE_SIGMA: f64 = 0.01;

pub fn chassis() -> TriMesh {
    let body = TriMesh::cuboid_subdivided(Vec3::new(0.50, -0.20, 0.0), Vec3::new(0.80, 0.20, 0.30), 2);
    // rear tab held by the fixation arm
    let tab = TriMesh::cuboid(Vec3::new(0.795, -0.005, 0.10), Vec3::new(0.85, 0.005, 0.20));
    TriMesh::merge(&[body, tab]).expect("non-empty")
}

pub fn cover() -> TriMesh {
    let plate = TriMesh::cuboid_subdivided(Vec3::new(0.48, -0.18, 0.02), Vec3::new(0.50, 0.18, 0.28), 2);
    let fin = TriMesh::cuboid(Vec3::new(0.44, -0.005, 0.10), Vec3::new(0.485, 0.005, 0.20));
    TriMesh::merge(&[plate, fin]).expect("non-empty")
}

/// Four hooks on the back of the cover. Angles and release deflections differ slightly so the
/// hooks let go one after another.
pub fn hooks() -> Vec<HookRecord> {
    let spots = [(0.15, 0.05, 0.35, 0.0020), (0.15, 0.25, 0.40, 0.0022), (-0.15, 0.05, 0.45, 0.0024), (-0.15, 0.25, 0.50, 0.0026)];
    spots
        .iter()
        .map(|&(y, z, theta, delta)| HookRecord {
            anchor: [0.50, y, z],
            theta,
            extraction_axis: [-1.0, 0.0, 0.0],
            k_in: 20000.0,
            k_out: 3000.0,
            k_rot: 300.0,
            release_deflection: delta,
            break_force: 250.0,
        })
        .collect()
}

/// Camera 1 m above the table looking straight down: camera x ↦ robot x, y ↦ −y, z ↦ −z.
pub fn calibration() -> Calibration {
    Calibration {
        rotation: Quat::from_axis_angle(&Vec3::x_axis(), PI),
        translation: Vec3::new(0.4, 0.0, 1.0),
    }
}

pub fn scene_config() -> SceneConfig {
    SceneConfig {
        base_mesh: "chassis.stl".into(),
        part_mesh: "cover.stl".into(),
        hooks: hooks(),
        gripper: GripperSpec::default(),
        limits: FailureLimits::default(),
        physics: PhysicsParams::default(),
        controller: ImpedanceParams::default(),
        noise_sigma: NOISE_SIGMA,
        sampling: SamplingParams::default(),
        thresholds: SimilarityThresholds::default(),
        direction_search: DirectionSearch::default(),
        filter_alpha: 0.5,
        control_dt: 1e-3,
        depth_axis: [0.0, 0.0, 1.0],
        calibration: Some("calibration.json".into()),
    }
}

/// The reference scene assembled in memory.
pub fn scene() -> Result<Scene> {
    build_scene(&scene_config(), chassis(), cover())
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Keypoints for a hand whose wrist sits at `wrist` (robot frame), fingers pointing along +x
/// and thumb-to-index along +y, as seen by the reference camera.
pub fn hand_at(t: f64, wrist: Vec3, grip: Grip) -> HandKeypoints {
    let cal = calibration().inverse();
    let w = cal.as_pose().transform_point(&wrist);
    HandKeypoints {
        timestamp: t,
        wrist: w,
        index_base: w + Vec3::new(0.08, -0.025, 0.0),
        thumb_base: w + Vec3::new(0.08, 0.025, 0.0),
        visibility: [true; 3],
        grip,
    }
}

/// Demonstration timeline: reach the handle (0 to 1.5 s), close the gripper at 1.6 s, pull
/// from 2 s to 3.5 s, hold until 6 s. `offset(t, u)` adds a displacement during the pull,
/// where `u` is the pull progress in [0, 1].
fn demonstration(offset: impl Fn(f64, f64) -> Vec3) -> Vec<HandKeypoints> {
    let grasp = Vec3::from(GRASP_POINT);
    let start = Vec3::new(0.30, 0.0, 0.30);
    let frames = (6.0 * FRAME_RATE).round() as usize;
    (0..=frames)
        .map(|k| {
            let t = k as f64 / FRAME_RATE;
            let reach = smoothstep(t / 1.5);
            let u = smoothstep((t - PULL_START) / PULL_DURATION);
            let wrist = start + (grasp - start) * reach - Vec3::x() * (PULL_DISTANCE * u) + offset(t, u);
            let grip = if t >= 1.6 - 1e-9 { Grip::Close } else { Grip::Open };
            hand_at(t, wrist, grip)
        })
        .collect()
}

pub fn straight_pull() -> Vec<HandKeypoints> {
    demonstration(|_, _| Vec3::zeros())
}

/// Pull with a slight upward arc (1 cm at mid-stroke).
pub fn curved_pull() -> Vec<HandKeypoints> {
    demonstration(|_, u| Vec3::z() * (0.01 * (PI * u).sin()))
}

/// Straight pull whose target jumps 0.2 m along the pull direction at t = 2.1 s.
pub fn jump_pull() -> Vec<HandKeypoints> {
    demonstration(|t, _| if t >= 2.1 - 1e-9 { -Vec3::x() * JUMP_DISTANCE } else { Vec3::zeros() })
}

/// The three Table-I style methods: single arm with position control, single arm with the
/// hybrid controller, and both arms with the hybrid controller.
pub fn methods() -> Vec<MethodSpec> {
    vec![
        MethodSpec {
            name: "baseline".into(),
            dual_arm: false,
            hybrid: false,
        },
        MethodSpec {
            name: "comparison".into(),
            dual_arm: false,
            hybrid: true,
        },
        MethodSpec {
            name: "proposed".into(),
            dual_arm: true,
            hybrid: true,
        },
    ]
}

pub fn experiment_config() -> ExperimentConfig {
    ExperimentConfig {
        scene_path: "scene.json".into(),
        trajectory_paths: vec!["trajectories/straight_pull.jsonl".into(), "trajectories/curved_pull.jsonl".into()],
        calibration_path: "calibration.json".into(),
        methods: methods(),
        trials_per_method: 10,
        noise_sigma: Some(NOISE_SIGMA),
        base_seed: 0,
        output_dir: "out".into(),
        jobs: None,
    }
}

/// Writes the reference scene, meshes, calibration, demonstrations and experiment file into
/// `dir` and returns the paths written.
pub fn write_fixtures(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let traj_dir = dir.join("trajectories");
    std::fs::create_dir_all(&traj_dir).map_err(|e| Error::io(&traj_dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        written.push(p);
        Ok(())
    };
    put("chassis.stl", write_stl_ascii(&chassis(), "chassis"))?;
    put("cover.stl", write_stl_ascii(&cover(), "cover"))?;
    put("scene.json", serde_json::to_string_pretty(&scene_config()).expect("serializes") + "\n")?;
    put("experiment.json", serde_json::to_string_pretty(&experiment_config()).expect("serializes") + "\n")?;
    let cal = dir.join("calibration.json");
    write_calibration(&cal, &calibration())?;
    written.push(cal);
    for (name, frames) in [("straight_pull", straight_pull()), ("curved_pull", curved_pull()), ("jump_pull", jump_pull())] {
        let p = traj_dir.join(format!("{name}.jsonl"));
        write_trajectory(&p, &frames)?;
        written.push(p);
    }
    Ok(written)
}
