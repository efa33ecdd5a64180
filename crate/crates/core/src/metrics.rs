//! Object pose deviation, quaternion angle, timeline normalization and success rates.

use nalgebra::Quaternion;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{check_unit, quat_to_xyzw, slerp, Pose, Quat, Vec3};
use crate::sim::TrialResult;

/// Duration every series is stretched to before curves are compared.
pub const NORMALIZED_DURATION: f64 = 16.0;
/// Resampling step on the normalized timeline.
pub const NORMALIZED_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub t: f64,
    pub position: Vec3,
    pub orientation: Quat,
}

impl PoseSample {
    pub fn new(t: f64, pose: &Pose) -> Self {
        PoseSample {
            t,
            position: pose.position,
            orientation: pose.orientation,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.position, self.orientation)
    }
}

/// Row of a serialized pose series: `t, x, y, z, qx, qy, qz, qw, deviation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSampleRecord {
    pub t: f64,
    pub position: [f64; 3],
    pub orientation: [f64; 4],
    pub deviation: f64,
}

impl PoseSampleRecord {
    pub fn new(sample: &PoseSample, deviation: f64) -> Self {
        PoseSampleRecord {
            t: sample.t,
            position: sample.position.into(),
            orientation: quat_to_xyzw(&sample.orientation),
            deviation,
        }
    }
}

/// `2·acos(|q_t · q_0|)`, in `[0, π]`.
pub fn quaternion_angle(q_t: &Quaternion<f64>, q_0: &Quaternion<f64>) -> Result<f64> {
    check_unit(q_t)?;
    check_unit(q_0)?;
    let d = q_t.coords.dot(&q_0.coords).abs().clamp(0.0, 1.0);
    Ok(2.0 * d.acos())
}

/// Position and angle terms of the deviation, reported separately.
pub fn deviation_terms(sample: &PoseSample, initial: &PoseSample) -> Result<(f64, f64)> {
    let pos = (sample.position - initial.position).norm();
    let ang = quaternion_angle(sample.orientation.as_ref(), initial.orientation.as_ref())?;
    Ok((pos, ang))
}

/// `‖Δp_t‖ + θ_t`, meters and radians summed unweighted.
pub fn pose_deviation(sample: &PoseSample, initial: &PoseSample) -> Result<f64> {
    let (pos, ang) = deviation_terms(sample, initial)?;
    Ok(pos + ang)
}

/// Stretches the series affinely onto `[0, target_duration]` and resamples it every `step`
/// seconds, interpolating positions linearly and orientations spherically.
///
/// The first and last output samples are copies of the input endpoints.
pub fn normalize_timeline(series: &[PoseSample], target_duration: f64, step: f64) -> Result<Vec<PoseSample>> {
    if series.len() < 2 {
        return Err(Error::validation("timeline normalization needs at least two samples"));
    }
    if !(target_duration > 0.0) || !(step > 0.0) {
        return Err(Error::validation("target duration and step must be positive"));
    }
    let t0 = series[0].t;
    let span = series[series.len() - 1].t - t0;
    if !(span > 0.0) {
        return Err(Error::validation("series must span a positive duration"));
    }
    if series.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::validation("series must be time-ordered"));
    }
    let scaled: Vec<f64> = series.iter().map(|s| (s.t - t0) / span * target_duration).collect();
    let n = (target_duration / step).round() as usize;

    let mut out = Vec::with_capacity(n + 1);
    let mut seg = 0;
    for k in 0..=n {
        let t = target_duration * k as f64 / n as f64;
        if k == 0 || k == n {
            let src = if k == 0 { &series[0] } else { &series[series.len() - 1] };
            out.push(PoseSample { t, ..*src });
            continue;
        }
        while seg + 2 < series.len() && scaled[seg + 1] <= t {
            seg += 1;
        }
        let (a, b) = (&series[seg], &series[seg + 1]);
        let width = scaled[seg + 1] - scaled[seg];
        let u = if width > 0.0 { ((t - scaled[seg]) / width).clamp(0.0, 1.0) } else { 1.0 };
        out.push(PoseSample {
            t,
            position: a.position + (b.position - a.position) * u,
            orientation: slerp(&a.orientation, &b.orientation, u),
        });
    }
    Ok(out)
}

/// Deviation of every sample from the first one.
pub fn deviation_series(series: &[PoseSample]) -> Result<Vec<(f64, f64, f64)>> {
    let Some(first) = series.first() else {
        return Ok(Vec::new());
    };
    series
        .iter()
        .map(|s| deviation_terms(s, first).map(|(p, a)| (s.t, p, a)))
        .collect()
}

pub fn success_rate(results: &[TrialResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::validation("success rate of an empty result list"));
    }
    let ok = results.iter().filter(|r| r.success).count();
    Ok(ok as f64 / results.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp_rotvec;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn sample(t: f64, p: [f64; 3], rot: [f64; 3]) -> PoseSample {
        PoseSample {
            t,
            position: Vec3::from(p),
            orientation: exp_rotvec(&Vec3::from(rot)),
        }
    }

    #[test]
    fn angle_examples() {
        let q = exp_rotvec(&Vec3::new(0.3, -0.2, 0.5));
        assert_eq!(quaternion_angle(q.as_ref(), q.as_ref()).unwrap(), 0.0);
        let neg = -*q.as_ref();
        assert!(quaternion_angle(&neg, q.as_ref()).unwrap().abs() < 1e-7);
        let z90 = exp_rotvec(&Vec3::new(0.0, 0.0, FRAC_PI_2));
        let a = quaternion_angle(z90.as_ref(), Quat::identity().as_ref()).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-12);
        assert!(quaternion_angle(&Quaternion::new(2.0, 0.0, 0.0, 0.0), q.as_ref()).is_err());
    }

    #[test]
    fn deviation_examples() {
        let a = sample(0.0, [0.0; 3], [0.0; 3]);
        assert_eq!(pose_deviation(&a, &a).unwrap(), 0.0);
        let b = sample(1.0, [0.03, 0.04, 0.0], [0.0; 3]);
        assert!((pose_deviation(&b, &a).unwrap() - 0.05).abs() < 1e-12);
        let c = sample(1.0, [0.1, 0.0, 0.0], [0.0, 0.0, FRAC_PI_2]);
        assert!((pose_deviation(&c, &a).unwrap() - (0.1 + FRAC_PI_2)).abs() < 1e-12);
    }

    #[test]
    fn identity_rescale_reproduces_input() {
        let series: Vec<_> = (0..=160)
            .map(|k| sample(k as f64 * 0.1, [k as f64 * 0.001, 0.0, 0.0], [0.0, 0.0, k as f64 * 0.005]))
            .collect();
        let out = normalize_timeline(&series, 16.0, 0.1).unwrap();
        assert_eq!(out.len(), 161);
        for (a, b) in out.iter().zip(&series) {
            assert!((a.t - b.t).abs() < 1e-12);
            assert!((a.position - b.position).norm() < 1e-12);
            assert!(crate::math::angle_between(&a.orientation, &b.orientation) < 1e-7);
        }
    }

    #[test]
    fn stretch_and_slerp_midpoint() {
        let series = vec![
            sample(0.0, [0.0; 3], [0.0; 3]),
            sample(4.0, [1.0, 0.0, 0.0], [0.0; 3]),
            sample(8.0, [2.0, 0.0, 0.0], [0.0; 3]),
        ];
        let out = normalize_timeline(&series, 16.0, 0.1).unwrap();
        assert_eq!(out.last().unwrap().t, 16.0);
        assert!((out[80].t - 8.0).abs() < 1e-12);
        assert!((out[80].position.x - 1.0).abs() < 1e-12);

        let two = vec![sample(0.0, [0.0; 3], [0.0; 3]), sample(1.0, [0.0; 3], [0.0, 0.0, FRAC_PI_2])];
        let out = normalize_timeline(&two, 16.0, 0.1).unwrap();
        let half = exp_rotvec(&Vec3::new(0.0, 0.0, FRAC_PI_4));
        assert!(crate::math::angle_between(&out[80].orientation, &half) < 1e-9);
        assert!(normalize_timeline(&two[..1], 16.0, 0.1).is_err());
    }
}
