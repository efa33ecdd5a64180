//! Snap-fit hooks as spring elements, and the disassembly direction they imply.
//!
//! A hook is characterised by the angle θ between its projection direction and the horizontal
//! extraction axis. A horizontal pull `F` splits into `F cos θ`, which deflects the hook out of
//! plane, and `F sin θ`. Release happens once the out-of-plane deflection reaches
//! `release_deflection`, so the pull needed grows as `1 / cos θ`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{orthonormal_basis, vec3, Vec3};

/// Floor on the direction cosine in the direction objective.
pub const COS_FLOOR: f64 = 1e-3;
const SINGULAR_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapFitHook {
    pub anchor: Vec3,
    pub theta: f64,
    pub extraction_axis: Vec3,
    pub k_in: f64,
    pub k_out: f64,
    pub k_rot: f64,
    pub release_deflection: f64,
    pub break_force: f64,
}

impl SnapFitHook {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::validation(format!("hook theta {} outside [0, pi/2]", self.theta)));
        }
        let positive = [self.k_in, self.k_out, self.k_rot, self.release_deflection, self.break_force];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::validation("hook stiffnesses, release deflection and break force must be positive"));
        }
        if (self.extraction_axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::validation("hook extraction axis must be a unit vector"));
        }
        if !self.anchor.iter().all(|c| c.is_finite()) {
            return Err(Error::validation("hook anchor must be finite"));
        }
        Ok(())
    }

    /// Resistance to displacement along the extraction axis, `k_out / cos θ`.
    pub fn axial_stiffness(&self) -> f64 {
        self.k_out / self.theta.cos().max(COS_FLOOR)
    }
}

/// Serialized hook definition (scene files).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookRecord {
    pub anchor: [f64; 3],
    pub theta: f64,
    pub extraction_axis: [f64; 3],
    pub k_in: f64,
    pub k_out: f64,
    pub k_rot: f64,
    pub release_deflection: f64,
    pub break_force: f64,
}

impl HookRecord {
    pub fn to_hook(&self) -> Result<SnapFitHook> {
        let axis = vec3(self.extraction_axis);
        let hook = SnapFitHook {
            anchor: vec3(self.anchor),
            theta: self.theta,
            extraction_axis: axis.try_normalize(1e-12).unwrap_or(axis),
            k_in: self.k_in,
            k_out: self.k_out,
            k_rot: self.k_rot,
            release_deflection: self.release_deflection,
            break_force: self.break_force,
        };
        hook.validate()?;
        Ok(hook)
    }
}

impl From<&SnapFitHook> for HookRecord {
    fn from(h: &SnapFitHook) -> Self {
        HookRecord {
            anchor: h.anchor.into(),
            theta: h.theta,
            extraction_axis: h.extraction_axis.into(),
            k_in: h.k_in,
            k_out: h.k_out,
            k_rot: h.k_rot,
            release_deflection: h.release_deflection,
            break_force: h.break_force,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookForceDecomposition {
    pub horizontal: f64,
    pub vertical: f64,
}

/// `(F cos θ, F sin θ)`.
pub fn decompose_hook_force(hook: &SnapFitHook, force: f64) -> Result<HookForceDecomposition> {
    if !(force >= 0.0) || !force.is_finite() {
        return Err(Error::validation(format!("hook force must be finite and non-negative, got {force}")));
    }
    Ok(HookForceDecomposition {
        horizontal: force * hook.theta.cos(),
        vertical: force * hook.theta.sin(),
    })
}

/// Horizontal pull needed to reach the release deflection: `k_out · δ / cos θ`.
pub fn required_extraction_force(hook: &SnapFitHook) -> Result<f64> {
    if hook.theta >= FRAC_PI_2 - SINGULAR_MARGIN {
        return Err(Error::Singularity { theta: hook.theta });
    }
    Ok(hook.k_out * hook.release_deflection / hook.theta.cos())
}

/// Direction search resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DirectionSearch {
    pub samples: usize,
    pub refine_tol: f64,
}

impl Default for DirectionSearch {
    fn default() -> Self {
        DirectionSearch {
            samples: 2000,
            refine_tol: 1e-10,
        }
    }
}

/// Worst-case pull over the hooks when extracting along `dir`.
pub fn direction_cost(hooks: &[SnapFitHook], required: &[f64], dir: &Vec3) -> f64 {
    hooks
        .iter()
        .zip(required)
        .map(|(h, f)| f / dir.dot(&h.extraction_axis).max(COS_FLOOR))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn estimate_disassembly_direction(hooks: &[SnapFitHook]) -> Result<Vec3> {
    estimate_disassembly_direction_with(hooks, &DirectionSearch::default())
}

/// Unit direction minimising the largest per-hook pull, where pulling along `d` costs
/// `F_req / max(cos∠(d, axis), ε)` for each hook.
///
/// Without the floor ε, minimising the worst pull means maximising `min_i d·w_i` with
/// `w_i = axis_i / F_req_i`, whose optimum is `d = p / |p|` for the point `p` of the convex hull
/// of the `w_i` closest to the origin. That point is computed exactly when the origin lies
/// outside the hull. A Fibonacci sphere provides a second seed, and a shrinking pattern search
/// on the tangent plane refines the better one (it only accepts improvements).
pub fn estimate_disassembly_direction_with(hooks: &[SnapFitHook], search: &DirectionSearch) -> Result<Vec3> {
    if hooks.is_empty() {
        return Err(Error::validation("at least one hook is required"));
    }
    let required = hooks
        .iter()
        .map(required_extraction_force)
        .collect::<Result<Vec<_>>>()?;
    let first = hooks[0].extraction_axis;
    if hooks.iter().all(|h| (h.extraction_axis - first).norm() < 1e-12) {
        return Ok(first);
    }

    let cost = |d: &Vec3| direction_cost(hooks, &required, d);
    let mut best = fibonacci_sphere(search.samples.max(2))
        .into_iter()
        .map(|d| (cost(&d), d))
        .fold((f64::INFINITY, Vec3::x()), |acc, (c, d)| if c < acc.0 { (c, d) } else { acc });
    let weights: Vec<Vec3> = hooks.iter().zip(&required).map(|(h, f)| h.extraction_axis / *f).collect();
    if let Some(d) = min_norm_point(&weights).and_then(|p| p.try_normalize(1e-300)) {
        let c = cost(&d);
        if c <= best.0 {
            best = (c, d);
        }
    }

    let directions: Vec<(f64, f64)> = (0..16)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / 16.0;
            (a.cos(), a.sin())
        })
        .collect();
    let mut step = (4.0 * PI / search.samples.max(2) as f64).sqrt();
    while step > search.refine_tol {
        let (u, v) = orthonormal_basis(&best.1);
        let mut improved = false;
        for &(c, s) in &directions {
            let trial = (best.1 + (u * c + v * s) * step).normalize();
            let tc = cost(&trial);
            if tc < best.0 {
                best = (tc, trial);
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best.1)
}

/// Point of the convex hull of `points` nearest the origin, or `None` when the origin lies
/// (numerically) inside the hull. In 3-D the nearest point lies on a face spanned by at most
/// three of the points, so every such subset is tried.
fn min_norm_point(points: &[Vec3]) -> Option<Vec3> {
    let n = points.len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let mut best: Option<Vec3> = None;
    let mut consider = |subset: &[usize]| {
        let Some(p) = affine_min_norm(points, subset) else {
            return;
        };
        // optimal iff no point of the set lies closer to the origin than the plane through p
        let pp = p.norm_squared();
        if pp > tol && points.iter().all(|w| w.dot(&p) >= pp - tol) && best.is_none_or(|b| pp < b.norm_squared()) {
            best = Some(p);
        }
    };
    for i in 0..n {
        consider(&[i]);
        for j in i + 1..n {
            consider(&[i, j]);
            for k in j + 1..n {
                consider(&[i, j, k]);
            }
        }
    }
    best
}

/// Nearest point to the origin on the affine hull of the selected points, if it falls inside
/// their simplex.
fn affine_min_norm(points: &[Vec3], subset: &[usize]) -> Option<Vec3> {
    let m = subset.len();
    let mut a = nalgebra::DMatrix::zeros(m + 1, m + 1);
    let mut b = nalgebra::DVector::zeros(m + 1);
    for (r, &i) in subset.iter().enumerate() {
        for (c, &j) in subset.iter().enumerate() {
            a[(r, c)] = points[i].dot(&points[j]);
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
    }
    b[m] = 1.0;
    let x = a.lu().solve(&b)?;
    if !x.iter().all(|v| v.is_finite()) || x.iter().take(m).any(|&l| l < -1e-12) {
        return None;
    }
    Some(subset.iter().enumerate().map(|(r, &i)| points[i] * x[r]).sum())
}

pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_6;

    pub(crate) fn hook(theta: f64, axis: Vec3) -> SnapFitHook {
        SnapFitHook {
            anchor: Vec3::zeros(),
            theta,
            extraction_axis: axis,
            k_in: 2e4,
            k_out: 1000.0,
            k_rot: 5.0,
            release_deflection: 0.005,
            break_force: 500.0,
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_hook_force(&hook(0.0, Vec3::x()), 10.0).unwrap();
        assert_eq!((d.horizontal, d.vertical), (10.0, 0.0));
        let d = decompose_hook_force(&hook(FRAC_PI_2, Vec3::x()), 10.0).unwrap();
        assert!(d.horizontal.abs() < 1e-15 && d.vertical == 10.0);
        let d = decompose_hook_force(&hook(FRAC_PI_6, Vec3::x()), 2.0).unwrap();
        assert!((d.horizontal - 3f64.sqrt()).abs() < 1e-15 && (d.vertical - 1.0).abs() < 1e-15);
        assert!(decompose_hook_force(&hook(0.1, Vec3::x()), -1.0).is_err());
    }

    #[test]
    fn required_force_examples() {
        assert!((required_extraction_force(&hook(0.0, Vec3::x())).unwrap() - 5.0).abs() < 1e-12);
        assert!((required_extraction_force(&hook(PI / 3.0, Vec3::x())).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(
            required_extraction_force(&hook(FRAC_PI_2, Vec3::x())),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn common_and_single_axes() {
        let hooks = [hook(0.2, Vec3::x()), hook(0.5, Vec3::x()), hook(1.0, Vec3::x())];
        assert_eq!(estimate_disassembly_direction(&hooks).unwrap(), Vec3::x());
        assert_eq!(estimate_disassembly_direction(&[hook(0.3, Vec3::y())]).unwrap(), Vec3::y());
        assert!(estimate_disassembly_direction(&[]).is_err());
    }

    #[test]
    fn validation_rejects_bad_hooks() {
        assert!(hook(-0.1, Vec3::x()).validate().is_err());
        assert!(hook(0.1, Vec3::new(2.0, 0.0, 0.0)).validate().is_err());
        let mut h = hook(0.1, Vec3::x());
        h.k_rot = 0.0;
        assert!(h.validate().is_err());
    }
}
