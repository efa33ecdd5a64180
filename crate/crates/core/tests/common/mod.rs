//! Analytic enumeration of grasp candidates on an axis-aligned box, shared by test targets.

use std::f64::consts::PI;

use dualarm::grasp::{GraspCandidate, GripperSpec, SamplingParams};
use dualarm::math::orthonormal_basis;
use dualarm::{TriMesh, Vec3};

pub const HALF: [f64; 3] = [0.05, 0.10, 0.15];

pub fn gripper() -> GripperSpec {
    GripperSpec {
        max_opening: 0.15,
        ..GripperSpec::default()
    }
}

pub fn mesh() -> TriMesh {
    TriMesh::cuboid(-Vec3::from(HALF), Vec3::from(HALF))
}

/// Centred lattice of pitch `p` over `[lo + m, hi - m]`.
fn lattice(lo: f64, hi: f64, p: f64, m: f64) -> Vec<f64> {
    let usable = hi - lo - 2.0 * m;
    let n = ((usable / p) + 1e-9).floor() as i64 + 1;
    let start = (lo + hi) / 2.0 - (n - 1) as f64 * p / 2.0;
    (0..n).map(|i| start + i as f64 * p).collect()
}

struct Oriented {
    center: Vec3,
    axes: [Vec3; 3],
    half: Vec3,
}

/// Separating-axis test between an oriented box and the solid box `[-HALF, HALF]`; touching
/// counts as overlap.
fn overlaps_box(b: &Oriented) -> bool {
    let world = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut axes: Vec<Vec3> = world.to_vec();
    axes.extend(b.axes);
    for w in &world {
        for a in &b.axes {
            let c = w.cross(a);
            if c.norm() > 1e-9 {
                axes.push(c.normalize());
            }
        }
    }
    axes.iter().all(|l| {
        let r_box: f64 = (0..3).map(|i| HALF[i] * world[i].dot(l).abs()).sum();
        let r_obb: f64 = (0..3).map(|i| b.half[i] * b.axes[i].dot(l).abs()).sum();
        b.center.dot(l).abs() <= r_box + r_obb + 1e-12
    })
}

fn gripper_hits_box(g: &GripperSpec, center: Vec3, axes: [Vec3; 3], width: f64) -> bool {
    let [ax, _, az] = axes;
    let finger_along = g.finger_box[0] / 2.0 - g.finger_length;
    let finger_across = width / 2.0 + g.finger_clearance + g.finger_box[2] / 2.0;
    let boxes = [
        (ax * finger_along - az * finger_across, g.finger_box),
        (ax * finger_along + az * finger_across, g.finger_box),
        (-ax * (g.finger_length + g.palm_box[0] / 2.0), g.palm_box),
    ];
    boxes.iter().any(|(offset, ext)| {
        overlaps_box(&Oriented {
            center: center + offset,
            axes,
            half: Vec3::from(*ext) / 2.0,
        })
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Expected {
    pub center: Vec3,
    pub approach: Vec3,
    pub closing: Vec3,
    pub a: Vec3,
    pub b: Vec3,
}

pub fn brute_force(g: &GripperSpec, s: &SamplingParams) -> Vec<Expected> {
    let mut out = Vec::new();
    for axis in 0..3 {
        let width = 2.0 * HALF[axis];
        if width > g.max_opening {
            continue;
        }
        for sign in [1.0, -1.0] {
            let mut n = Vec3::zeros();
            n[axis] = sign;
            let (u, v) = orthonormal_basis(&n);
            let range = |d: &Vec3| {
                let r: f64 = (0..3).map(|i| HALF[i] * d[i].abs()).sum();
                (-r, r)
            };
            let (ul, uh) = range(&u);
            let (vl, vh) = range(&v);
            for a in lattice(ul, uh, s.spacing, s.min_boundary_dist) {
                for b in lattice(vl, vh, s.spacing, s.min_boundary_dist) {
                    let pa = u * a + v * b + n * HALF[axis];
                    let pb = pa - n * width;
                    let closing = -n;
                    let (cu, cv) = orthonormal_basis(&closing);
                    for k in 0..s.approach_steps {
                        let ang = 2.0 * PI * k as f64 / s.approach_steps as f64;
                        let approach = cu * ang.cos() + cv * ang.sin();
                        let lateral = closing.cross(&approach);
                        let center = (pa + pb) / 2.0;
                        if !gripper_hits_box(g, center, [approach, lateral, closing], width) {
                            out.push(Expected {
                                center,
                                approach,
                                closing,
                                a: pa,
                                b: pb,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn key(center: &Vec3, approach: &Vec3, closing: &Vec3) -> [i64; 9] {
    let r = |x: f64| (x * 1e7).round() as i64;
    [
        r(center.x),
        r(center.y),
        r(center.z),
        r(approach.x),
        r(approach.y),
        r(approach.z),
        r(closing.x),
        r(closing.y),
        r(closing.z),
    ]
}


/// Compares generated candidates with the enumeration; `Err` describes the first mismatch.
pub fn compare(got: &[GraspCandidate], want: &[Expected]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{} candidates, oracle has {}", got.len(), want.len()));
    }
    let mut got = got.to_vec();
    let mut want = want.to_vec();
    got.sort_by_key(|c| key(&c.center, &c.approach_axis(), &c.closing_axis()));
    want.sort_by_key(|e| key(&e.center, &e.approach, &e.closing));
    for (c, e) in got.iter().zip(&want) {
        let close = (c.center - e.center).norm() < 1e-9
            && (c.approach_axis() - e.approach).norm() < 1e-9
            && (c.closing_axis() - e.closing).norm() < 1e-9
            && (c.contact_a.position - e.a).norm() < 1e-9
            && (c.contact_b.position - e.b).norm() < 1e-9
            && (c.jaw_width - (e.b - e.a).norm()).abs() < 1e-9;
        if !close {
            return Err(format!("candidate at {:?} differs from oracle at {:?}", c.center, e.center));
        }
    }
    Ok(())
}

/// Midpoint, width and antipodality invariants of a single candidate.
pub fn well_formed(c: &GraspCandidate, g: &GripperSpec) -> bool {
    let mid = (c.contact_a.position + c.contact_b.position) / 2.0;
    let width = (c.contact_b.position - c.contact_a.position).norm();
    (c.center - mid).norm() < 1e-12
        && (c.jaw_width - width).abs() < 1e-12
        && c.jaw_width <= g.max_opening + 1e-12
        && c.contact_a.normal.dot(&c.contact_b.normal) < -(10f64.to_radians().cos())
        && c.approach_axis().dot(&c.closing_axis()).abs() < 1e-12
        && (c.orientation.norm() - 1.0).abs() < 1e-12
}
