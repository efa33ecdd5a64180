//! Grasp candidates on an axis-aligned box against an analytic enumeration.

mod common;

use common::{brute_force, compare, gripper, mesh, well_formed};
use dualarm::grasp::{generate_grasp_candidates, GripperSpec, SamplingParams};
use dualarm::{TriMesh, Vec3};

#[test]
fn box_candidates_match_enumeration() {
    let start = std::time::Instant::now();
    let g = gripper();
    let s = SamplingParams::default();
    let got = generate_grasp_candidates(&mesh(), &g, &s);
    let want = brute_force(&g, &s);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert!(!want.is_empty());
    compare(&got, &want).unwrap();
}

#[test]
fn box_candidates_are_well_formed() {
    let g = gripper();
    let found = generate_grasp_candidates(&mesh(), &g, &SamplingParams::default());
    assert!(found.iter().all(|c| well_formed(c, &g)));
    assert!(found.iter().all(|c| (c.jaw_width - 0.1).abs() < 1e-9));
}

#[test]
fn narrow_gripper_finds_nothing_on_wide_box() {
    let g = GripperSpec {
        max_opening: 0.09,
        ..GripperSpec::default()
    };
    assert!(generate_grasp_candidates(&mesh(), &g, &SamplingParams::default()).is_empty());
}

#[test]
fn small_cube_is_graspable_across_every_face_pair() {
    let cube = TriMesh::cuboid(Vec3::repeat(-0.025), Vec3::repeat(0.025));
    let found = generate_grasp_candidates(&cube, &gripper(), &SamplingParams::default());
    for axis in 0..3 {
        assert!(found.iter().any(|c| c.closing_axis()[axis].abs() > 1.0 - 1e-9), "no grasp across axis {axis}");
    }
    assert!(found.iter().all(|c| (c.jaw_width - 0.05).abs() < 1e-9));
}

#[test]
fn sphere_wider_than_the_opening_has_no_grasps() {
    let ball = TriMesh::icosphere(Vec3::zeros(), 0.1, 2);
    assert!(generate_grasp_candidates(&ball, &gripper(), &SamplingParams::default()).is_empty());
}
