use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dualarm::experiment::ExperimentConfig;
use dualarm::grasp::CandidateRecord;
use dualarm::hand::read_trajectory;
use dualarm::hooks::{direction_cost, estimate_disassembly_direction_with};
use dualarm::{emit_report, fixtures, required_extraction_force, run_experiment, run_trial, Calibration, ControlMode, ControllerSpec, Error, LoadedScene, NoiseModel, TrialResult};
use serde_json::json;

#[derive(Parser)]
#[command(name = "sim", version, about = "Affordance-guided dual-arm disassembly in simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every method of an experiment file and write the report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the experiment's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed; trial i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum number of trials running at once.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write the collision-free disassembly grasp candidates of a scene.
    Grasps {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the estimated disassembly direction of a scene.
    Direction {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Replay one demonstration and report its outcome.
    Trial {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
        /// Camera calibration; defaults to the one named in the scene.
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Hybrid)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Arms::Dual)]
        arms: Arms,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tracking noise (m); defaults to the scene's value.
        #[arg(long)]
        sigma: Option<f64>,
        /// Directory for trial.json and trial.csv; the summary goes to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the reference scene, demonstrations and experiment file.
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hybrid,
    Position,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arms {
    Dual,
    Single,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SIM_LOG", "warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::PartialOutput { written, .. } = &e {
                for p in written {
                    eprintln!("  written: {}", p.display());
                }
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        return 3;
    }
    match e {
        Error::Convergence { .. } => 1,
        _ => 2,
    }
}

fn dispatch(cmd: Command) -> dualarm::Result<()> {
    match cmd {
        Command::Run { config, out, seed, jobs } => run(&config, out, seed, jobs),
        Command::Grasps { scene, out } => grasps(&scene, &out),
        Command::Direction { scene } => direction(&scene),
        Command::Trial {
            scene,
            trajectory,
            calibration,
            mode,
            arms,
            seed,
            sigma,
            out,
        } => trial(&scene, &trajectory, calibration, mode, arms, seed, sigma, out),
        Command::Fixtures { out } => {
            for p in fixtures::write_fixtures(&out)? {
                println!("{}", p.display());
            }
            Ok(())
        }
    }
}

fn run(config: &Path, out: Option<PathBuf>, seed: Option<u64>, jobs: Option<usize>) -> dualarm::Result<()> {
    let (mut cfg, dir) = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if jobs.is_some() {
        cfg.jobs = jobs;
    }
    cfg.validate()?;
    let out = out.unwrap_or_else(|| if cfg.output_dir.is_absolute() { cfg.output_dir.clone() } else { dir.join(&cfg.output_dir) });
    log::info!("running {} method(s) x {} trial(s)", cfg.methods.len(), cfg.trials_per_method);
    let report = run_experiment(&cfg, &dir)?;
    for p in emit_report(&report, &out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn grasps(scene: &Path, out: &Path) -> dualarm::Result<()> {
    let loaded = LoadedScene::load(scene)?;
    let records: Vec<CandidateRecord> = loaded.scene.settings.candidates.iter().map(CandidateRecord::from).collect();
    let text = serde_json::to_string_pretty(&records).expect("candidates serialize") + "\n";
    std::fs::write(out, text).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    println!("{} candidate(s) written to {}", records.len(), out.display());
    Ok(())
}

fn direction(scene: &Path) -> dualarm::Result<()> {
    let loaded = LoadedScene::load(scene)?;
    let hooks = loaded.config.hooks()?;
    let dir = estimate_disassembly_direction_with(&hooks, &loaded.config.direction_search)?;
    let required = hooks.iter().map(required_extraction_force).collect::<dualarm::Result<Vec<f64>>>()?;
    let out = json!({
        "direction": [dir.x, dir.y, dir.z],
        "required_forces": required,
        "cost": direction_cost(&hooks, &required, &dir),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn trial(
    scene: &Path,
    trajectory: &Path,
    calibration: Option<PathBuf>,
    mode: Mode,
    arms: Arms,
    seed: u64,
    sigma: Option<f64>,
    out: Option<PathBuf>,
) -> dualarm::Result<()> {
    let loaded = LoadedScene::load(scene)?;
    let cal = match calibration {
        Some(p) => Calibration::load(p)?,
        None => loaded
            .calibration
            .ok_or_else(|| Error::Config("no calibration given and the scene names none".into()))?,
    };
    let frames = read_trajectory(trajectory)?;
    let sigma = sigma.unwrap_or(loaded.config.noise_sigma);
    if !(sigma >= 0.0) {
        return Err(Error::Config("sigma must be non-negative".into()));
    }
    let spec = ControllerSpec {
        mode: match mode {
            Mode::Hybrid => ControlMode::Hybrid,
            Mode::Position => ControlMode::PositionOnly,
        },
        params: loaded.config.controller,
    };
    let result = run_trial(&loaded.scene, &frames, &cal, &spec, matches!(arms, Arms::Dual), &NoiseModel { seed, sigma });
    let summary = serde_json::to_string_pretty(&trial_summary(&result)).expect("serializes") + "\n";
    match out {
        None => print!("{summary}"),
        Some(dir) => {
            let io = |p: &Path, source| Error::Io {
                path: p.to_path_buf(),
                source,
            };
            std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
            let json_path = dir.join("trial.json");
            std::fs::write(&json_path, summary).map_err(|e| io(&json_path, e))?;
            let csv_path = dir.join("trial.csv");
            std::fs::write(&csv_path, trial_csv(&result)).map_err(|e| Error::PartialOutput {
                written: vec![json_path.clone()],
                source: Box::new(io(&csv_path, e)),
            })?;
            println!("{}\n{}", json_path.display(), csv_path.display());
        }
    }
    Ok(())
}

fn trial_summary(r: &TrialResult) -> serde_json::Value {
    json!({
        "success": r.success,
        "failure": r.failure.map(|f| f.as_str()),
        "released_hooks": r.released_hooks,
        "total_hooks": r.total_hooks,
        "duration": r.duration,
        "completion_time": r.completion_time,
        "peak_contact_force": r.peak_contact_force,
        "max_deviation": r.max_deviation(),
        "samples": r.deviation_series.len(),
    })
}

fn trial_csv(r: &TrialResult) -> String {
    let mut s = String::from("t,x,y,z,qx,qy,qz,qw,deviation\n");
    for d in &r.deviation_series {
        let p = d.pose.position;
        let q = d.pose.orientation.coords;
        s += &format!("{},{},{},{},{},{},{},{},{}\n", d.t, p.x, p.y, p.z, q.x, q.y, q.z, q.w, d.deviation);
    }
    s
}
