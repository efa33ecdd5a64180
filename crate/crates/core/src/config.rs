//! Scene files: meshes, hooks, gripper, limits, controller and replay settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grasp::{filter_colliding_candidates, generate_grasp_candidates, GraspCandidate, GripperSpec, SamplingParams, SimilarityThresholds};
use crate::hand::{Calibration, CalibrationRecord};
use crate::hooks::{DirectionSearch, HookRecord, SnapFitHook};
use crate::impedance::ImpedanceParams;
use crate::math::vec3;
use crate::mesh::{load_mesh, TriMesh};
use crate::sim::{FailureLimits, PhysicsParams, Scene, SimSettings};

fn default_alpha() -> f64 {
    0.5
}

fn default_control_dt() -> f64 {
    1e-3
}

fn default_depth_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Scene description as stored on disk. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    /// Immobile chassis the part is clipped to.
    pub base_mesh: PathBuf,
    /// The part being removed.
    pub part_mesh: PathBuf,
    pub hooks: Vec<HookRecord>,
    #[serde(default)]
    pub gripper: GripperSpec,
    #[serde(default)]
    pub limits: FailureLimits,
    #[serde(default)]
    pub physics: PhysicsParams,
    #[serde(default)]
    pub controller: ImpedanceParams,
    /// Tracking noise applied to hand keypoints (m).
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub sampling: SamplingParams,
    #[serde(default)]
    pub thresholds: SimilarityThresholds,
    #[serde(default)]
    pub direction_search: DirectionSearch,
    #[serde(default = "default_alpha")]
    pub filter_alpha: f64,
    #[serde(default = "default_control_dt")]
    pub control_dt: f64,
    #[serde(default = "default_depth_axis")]
    pub depth_axis: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<PathBuf>,
}

impl SceneConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<SceneConfig> {
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SceneConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = SceneConfig::from_json(&text, path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        cfg.base_mesh = resolve(dir, &cfg.base_mesh);
        cfg.part_mesh = resolve(dir, &cfg.part_mesh);
        cfg.calibration = cfg.calibration.as_ref().map(|c| resolve(dir, c));
        Ok(cfg)
    }

    pub fn hooks(&self) -> Result<Vec<SnapFitHook>> {
        self.hooks.iter().map(HookRecord::to_hook).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.gripper.validate()?;
        self.limits.validate()?;
        self.physics.validate()?;
        self.controller.validate()?;
        self.thresholds.validate()?;
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::validation("noise_sigma must be non-negative"));
        }
        if !(self.filter_alpha > 0.0 && self.filter_alpha <= 1.0) {
            return Err(Error::validation("filter_alpha must lie in (0, 1]"));
        }
        if !(self.control_dt > 0.0 && self.control_dt <= self.controller.dt_max) {
            return Err(Error::validation("control_dt must lie in (0, controller.dt_max]"));
        }
        Ok(())
    }
}

pub(crate) fn resolve(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

/// A scene ready for trials, with its grasp candidates computed.
#[derive(Debug, Clone)]
pub struct LoadedScene {
    pub config: SceneConfig,
    pub scene: Scene,
    pub calibration: Option<Calibration>,
}

impl LoadedScene {
    pub fn load(path: impl AsRef<Path>) -> Result<LoadedScene> {
        let config = SceneConfig::load(path)?;
        let base = load_mesh(&config.base_mesh)?.mesh;
        let part = load_mesh(&config.part_mesh)?.mesh;
        let calibration = config.calibration.as_ref().map(Calibration::load).transpose()?;
        let scene = build_scene(&config, base, part)?;
        Ok(LoadedScene {
            config,
            scene,
            calibration,
        })
    }
}

/// Disassembly candidates on `part` that clear `base`, and the first fixation candidate on
/// `base` that clears `part`.
pub fn plan_grasps(base: &TriMesh, part: &TriMesh, gripper: &GripperSpec, sampling: &SamplingParams) -> (Vec<GraspCandidate>, Option<GraspCandidate>) {
    let on_part = generate_grasp_candidates(part, gripper, sampling);
    let disassembly = filter_colliding_candidates(&on_part, std::slice::from_ref(base), gripper);
    let on_base = generate_grasp_candidates(base, gripper, sampling);
    let fixation = filter_colliding_candidates(&on_base, std::slice::from_ref(part), gripper)
        .into_iter()
        .next();
    (disassembly, fixation)
}

pub fn build_scene(config: &SceneConfig, base: TriMesh, part: TriMesh) -> Result<Scene> {
    config.validate()?;
    let (candidates, fixation) = plan_grasps(&base, &part, &config.gripper, &config.sampling);
    let mut scene = Scene::new(base, part, config.hooks()?, config.gripper, config.limits, config.physics)?;
    scene.settings = SimSettings {
        candidates,
        fixation_candidate: fixation,
        thresholds: config.thresholds,
        depth_axis: vec3(config.depth_axis),
        filter_alpha: config.filter_alpha,
        control_dt: config.control_dt,
    };
    Ok(scene)
}

/// Writes a calibration file.
pub fn write_calibration(path: impl AsRef<Path>, cal: &Calibration) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&CalibrationRecord::from(cal)).expect("calibration serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}
