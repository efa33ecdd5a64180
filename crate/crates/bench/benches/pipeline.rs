use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dualarm::fixtures;
use dualarm::grasp::{generate_grasp_candidates, GripperSpec, SamplingParams};
use dualarm::sim::{run_trial, ControllerSpec, NoiseModel};
use dualarm::{estimate_disassembly_direction, step_impedance, ControlMode, ImpedanceParams, ImpedanceState, SnapFitHook, TriMesh, Vec3};

fn grasps(c: &mut Criterion) {
    let cover = fixtures::cover();
    let cuboid = TriMesh::cuboid(Vec3::new(-0.05, -0.1, -0.15), Vec3::new(0.05, 0.1, 0.15));
    let gripper = GripperSpec::default();
    let params = SamplingParams::default();
    c.bench_function("grasp_candidates_cover", |b| b.iter(|| generate_grasp_candidates(black_box(&cover), &gripper, &params)));
    c.bench_function("grasp_candidates_cuboid", |b| b.iter(|| generate_grasp_candidates(black_box(&cuboid), &gripper, &params)));
}

fn direction(c: &mut Criterion) {
    let aligned = fixtures::scene().unwrap().hooks;
    let tilted: Vec<_> = aligned
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let a = i as f64 * 1.7;
            let tilt = Vec3::new(0.0, 0.3 * a.cos(), 0.3 * a.sin());
            SnapFitHook {
                extraction_axis: (h.extraction_axis + tilt).normalize(),
                theta: h.theta + 0.05 * i as f64,
                ..*h
            }
        })
        .collect();
    c.bench_function("disassembly_direction_aligned", |b| b.iter(|| estimate_disassembly_direction(black_box(&aligned)).unwrap()));
    c.bench_function("disassembly_direction_tilted", |b| b.iter(|| estimate_disassembly_direction(black_box(&tilted)).unwrap()));
}

fn impedance(c: &mut Criterion) {
    let params = ImpedanceParams::default();
    let wrench = [10.0, -3.0, 1.0, 0.1, 0.0, -0.2];
    c.bench_function("impedance_1000_steps", |b| {
        b.iter(|| {
            let mut s = ImpedanceState::default();
            for _ in 0..1000 {
                s = step_impedance(&s, &params, black_box(&wrench), 1e-3).unwrap();
            }
            s
        })
    });
}

fn trial(c: &mut Criterion) {
    let scene = fixtures::scene().unwrap();
    let calibration = fixtures::calibration();
    let traj = fixtures::straight_pull();
    let controller = ControllerSpec {
        mode: ControlMode::Hybrid,
        params: ImpedanceParams::default(),
    };
    let noise = NoiseModel {
        seed: 0,
        sigma: fixtures::NOISE_SIGMA,
    };
    let mut group = c.benchmark_group("trial");
    group.sample_size(10);
    group.bench_function("straight_pull_dual_hybrid", |b| {
        b.iter(|| run_trial(black_box(&scene), &traj, &calibration, &controller, true, &noise))
    });
    group.finish();
}

criterion_group!(benches, grasps, direction, impedance, trial);
criterion_main!(benches);
