//! Multi-method, multi-trial experiments and their reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{resolve, LoadedScene, SceneConfig};
use crate::error::{Error, Result};
use crate::hand::{read_trajectory, Calibration, CalibrationRecord, HandKeypoints};
use crate::impedance::ControlMode;
use crate::metrics::{deviation_series, normalize_timeline, success_rate, PoseSample, NORMALIZED_DURATION, NORMALIZED_STEP};
use crate::sim::{run_trial, ControllerSpec, FailureReason, NoiseModel, TrialResult};

fn default_trials() -> usize {
    10
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub dual_arm: bool,
    pub hybrid: bool,
}

impl MethodSpec {
    pub fn mode(&self) -> ControlMode {
        if self.hybrid {
            ControlMode::Hybrid
        } else {
            ControlMode::PositionOnly
        }
    }
}

/// Experiment file. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scene_path: PathBuf,
    pub trajectory_paths: Vec<PathBuf>,
    pub calibration_path: PathBuf,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_trials")]
    pub trials_per_method: usize,
    /// Overrides the scene's tracking noise when set (m).
    #[serde(default)]
    pub noise_sigma: Option<f64>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Upper bound on concurrently running trials; all cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<(ExperimentConfig, PathBuf)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok((cfg, dir))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_method == 0 {
            return Err(Error::Config("trials_per_method must be at least 1".into()));
        }
        if self.trajectory_paths.is_empty() {
            return Err(Error::Config("at least one trajectory is required".into()));
        }
        let mut names = BTreeSet::new();
        for m in &self.methods {
            if !names.insert(m.name.as_str()) {
                return Err(Error::Config(format!("duplicate method name {:?}", m.name)));
            }
            if m.name.is_empty() || m.name.contains(['/', '\\']) {
                return Err(Error::Config(format!("method name {:?} is not usable as a file name", m.name)));
            }
        }
        if self.noise_sigma.is_some_and(|s| !(s >= 0.0)) {
            return Err(Error::Config("noise_sigma must be non-negative".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Materialized inputs echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub experiment: ExperimentConfig,
    pub scene: SceneConfig,
    pub calibration: CalibrationRecord,
    pub noise_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub index: usize,
    pub seed: u64,
    pub trajectory: String,
    pub success: bool,
    pub failure: Option<FailureReason>,
    pub released_hooks: usize,
    pub total_hooks: usize,
    pub duration: f64,
    pub completion_time: Option<f64>,
    /// Completion time on the normalized timeline.
    pub normalized_completion: Option<f64>,
    pub peak_contact_force: f64,
    pub max_deviation: f64,
    pub max_normalized_deviation: Option<f64>,
}

/// Deviation curves on the normalized timeline.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DeviationCurves {
    pub t: Vec<f64>,
    pub mean_deviation: Vec<f64>,
    pub mean_pos_term: Vec<f64>,
    pub mean_ang_term: Vec<f64>,
    /// One curve per trial, in trial order; trials with fewer than two samples are absent.
    pub trials: Vec<TrialCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCurve {
    pub index: usize,
    pub deviation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub name: String,
    pub dual_arm: bool,
    pub hybrid: bool,
    pub success_rate: f64,
    pub trials: Vec<TrialSummary>,
    pub curves: DeviationCurves,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub methods: Vec<MethodReport>,
}

/// Everything a run needs, read and validated up front.
pub struct ExperimentInputs {
    pub scene: LoadedScene,
    pub calibration: Calibration,
    pub trajectories: Vec<(String, Vec<HandKeypoints>)>,
    pub noise_sigma: f64,
}

impl ExperimentInputs {
    pub fn load(cfg: &ExperimentConfig, base_dir: &Path) -> Result<ExperimentInputs> {
        cfg.validate()?;
        let scene = LoadedScene::load(resolve(base_dir, &cfg.scene_path))?;
        let calibration = Calibration::load(resolve(base_dir, &cfg.calibration_path))?;
        let trajectories = cfg
            .trajectory_paths
            .iter()
            .map(|p| {
                let frames = read_trajectory(resolve(base_dir, p))?;
                Ok((p.to_string_lossy().into_owned(), frames))
            })
            .collect::<Result<Vec<_>>>()?;
        let noise_sigma = cfg.noise_sigma.unwrap_or(scene.config.noise_sigma);
        Ok(ExperimentInputs {
            scene,
            calibration,
            trajectories,
            noise_sigma,
        })
    }
}

/// Loads every input, then runs each method for `trials_per_method` trials. Trial `i` of
/// every method uses seed `base_seed + i` and trajectory `i mod n`, so methods see matched
/// inputs. Trials run on at most `jobs` threads; results do not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<ExperimentReport> {
    let inputs = ExperimentInputs::load(cfg, base_dir)?;
    run_with_inputs(cfg, &inputs, base_dir)
}

pub fn run_with_inputs(cfg: &ExperimentConfig, inputs: &ExperimentInputs, base_dir: &Path) -> Result<ExperimentReport> {
    let tasks: Vec<(usize, usize)> = (0..cfg.methods.len())
        .flat_map(|m| (0..cfg.trials_per_method).map(move |i| (m, i)))
        .collect();
    let run = |&(m, i): &(usize, usize)| {
        let method = &cfg.methods[m];
        let (_, traj) = &inputs.trajectories[i % inputs.trajectories.len()];
        let controller = ControllerSpec {
            mode: method.mode(),
            params: inputs.scene.config.controller,
        };
        let noise = NoiseModel {
            seed: cfg.base_seed.wrapping_add(i as u64),
            sigma: inputs.noise_sigma,
        };
        run_trial(&inputs.scene.scene, traj, &inputs.calibration, &controller, method.dual_arm, &noise)
    };
    let threads = cfg.jobs.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<TrialResult> = pool.install(|| tasks.par_iter().map(run).collect());

    let mut methods = Vec::with_capacity(cfg.methods.len());
    for (m, spec) in cfg.methods.iter().enumerate() {
        let chunk = &results[m * cfg.trials_per_method..(m + 1) * cfg.trials_per_method];
        methods.push(method_report(cfg, inputs, spec, chunk)?);
    }
    Ok(ExperimentReport {
        config: echo(cfg, inputs, base_dir),
        methods,
    })
}

fn echo(cfg: &ExperimentConfig, inputs: &ExperimentInputs, base_dir: &Path) -> ConfigEcho {
    let relative = |p: &Path| p.strip_prefix(base_dir).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf());
    let mut scene = inputs.scene.config.clone();
    scene.base_mesh = relative(&scene.base_mesh);
    scene.part_mesh = relative(&scene.part_mesh);
    scene.calibration = scene.calibration.as_deref().map(relative);
    let mut experiment = cfg.clone();
    experiment.jobs = None;
    ConfigEcho {
        experiment,
        scene,
        calibration: CalibrationRecord::from(&inputs.calibration),
        noise_sigma: inputs.noise_sigma,
    }
}

/// Deviation of a trial's object pose on the normalized timeline: `(deviation, pos, ang)`.
pub fn normalized_deviation(result: &TrialResult) -> Result<Option<Vec<(f64, f64, f64)>>> {
    if result.deviation_series.len() < 2 {
        return Ok(None);
    }
    let samples: Vec<PoseSample> = result.deviation_series.iter().map(|d| PoseSample::new(d.t, &d.pose)).collect();
    let normalized = normalize_timeline(&samples, NORMALIZED_DURATION, NORMALIZED_STEP)?;
    let dev = deviation_series(&normalized)?;
    Ok(Some(dev.into_iter().map(|(_, p, a)| (p + a, p, a)).collect()))
}

fn method_report(cfg: &ExperimentConfig, inputs: &ExperimentInputs, spec: &MethodSpec, results: &[TrialResult]) -> Result<MethodReport> {
    let mut trials = Vec::with_capacity(results.len());
    let mut curves = DeviationCurves::default();
    let mut sums: Vec<[f64; 3]> = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let norm = normalized_deviation(r)?;
        if let Some(n) = &norm {
            if sums.is_empty() {
                sums = vec![[0.0; 3]; n.len()];
            }
            for (s, v) in sums.iter_mut().zip(n) {
                s[0] += v.0;
                s[1] += v.1;
                s[2] += v.2;
            }
            curves.trials.push(TrialCurve {
                index: i,
                deviation: n.iter().map(|v| v.0).collect(),
            });
        }
        let t0 = r.deviation_series.first().map(|d| d.t).unwrap_or(0.0);
        trials.push(TrialSummary {
            index: i,
            seed: cfg.base_seed.wrapping_add(i as u64),
            trajectory: inputs.trajectories[i % inputs.trajectories.len()].0.clone(),
            success: r.success,
            failure: r.failure,
            released_hooks: r.released_hooks,
            total_hooks: r.total_hooks,
            duration: r.duration,
            completion_time: r.completion_time,
            normalized_completion: r
                .completion_time
                .filter(|_| r.duration > 0.0)
                .map(|c| (c - t0) / r.duration * NORMALIZED_DURATION),
            peak_contact_force: r.peak_contact_force,
            max_deviation: r.max_deviation(),
            max_normalized_deviation: norm.map(|n| n.iter().map(|v| v.0).fold(0.0, f64::max)),
        });
    }
    if !curves.trials.is_empty() {
        let count = curves.trials.len() as f64;
        let n = sums.len();
        curves.t = (0..n).map(|k| NORMALIZED_DURATION * k as f64 / (n - 1) as f64).collect();
        curves.mean_deviation = sums.iter().map(|s| s[0] / count).collect();
        curves.mean_pos_term = sums.iter().map(|s| s[1] / count).collect();
        curves.mean_ang_term = sums.iter().map(|s| s[2] / count).collect();
    }
    Ok(MethodReport {
        name: spec.name.clone(),
        dual_arm: spec.dual_arm,
        hybrid: spec.hybrid,
        success_rate: if results.is_empty() { 0.0 } else { success_rate(results)? },
        trials,
        curves,
    })
}

pub fn summary_table(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let width = report.methods.iter().map(|m| m.name.len()).max().unwrap_or(6).max(6);
    let mark = |b: bool| if b { "x" } else { "-" };
    writeln!(s, "{:<width$}  Dual arms  Affordance  Hybrid controller  Success  Rate", "Method").unwrap();
    for m in &report.methods {
        let ok = m.trials.iter().filter(|t| t.success).count();
        writeln!(
            s,
            "{:<width$}  {:<9}  {:<10}  {:<17}  {:>7}  {:.2}",
            m.name,
            mark(m.dual_arm),
            "x",
            mark(m.hybrid),
            format!("{ok}/{}", m.trials.len()),
            m.success_rate
        )
        .unwrap();
    }
    let mut failures = String::new();
    for m in &report.methods {
        let mut counts: Vec<(&str, usize)> = Vec::new();
        for t in m.trials.iter().filter_map(|t| t.failure) {
            match counts.iter_mut().find(|(n, _)| *n == t.as_str()) {
                Some(c) => c.1 += 1,
                None => counts.push((t.as_str(), 1)),
            }
        }
        if !counts.is_empty() {
            let list: Vec<String> = counts.iter().map(|(n, c)| format!("{n} x{c}")).collect();
            writeln!(failures, "  {}: {}", m.name, list.join(", ")).unwrap();
        }
    }
    if !failures.is_empty() {
        s.push_str("\nFailures:\n");
        s.push_str(&failures);
    }
    s
}

pub fn deviation_csv(curves: &DeviationCurves) -> String {
    let mut s = String::from("t,mean_deviation,mean_pos_term,mean_ang_term");
    for c in &curves.trials {
        write!(s, ",trial_{}", c.index).unwrap();
    }
    s.push('\n');
    for k in 0..curves.t.len() {
        write!(
            s,
            "{:.1},{},{},{}",
            curves.t[k], curves.mean_deviation[k], curves.mean_pos_term[k], curves.mean_ang_term[k]
        )
        .unwrap();
        for c in &curves.trials {
            write!(s, ",{}", c.deviation[k]).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Writes `report.json`, `summary.txt` and one `deviation_<method>.csv` per method that has
/// curves. On failure the error lists the files already written.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let partial = |written: &Vec<PathBuf>, e: Error| Error::PartialOutput {
        written: written.clone(),
        source: Box::new(e),
    };
    std::fs::create_dir_all(dir).map_err(|e| partial(&written, Error::io(dir, e)))?;
    let mut files = vec![
        ("report.json".to_string(), serde_json::to_string_pretty(report).expect("report serializes") + "\n"),
        ("summary.txt".to_string(), summary_table(report)),
    ];
    for m in &report.methods {
        if !m.curves.trials.is_empty() {
            files.push((format!("deviation_{}.csv", m.name), deviation_csv(&m.curves)));
        }
    }
    for (name, text) in files {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| partial(&written, Error::io(&p, e)))?;
        written.push(p);
    }
    Ok(written)
}
