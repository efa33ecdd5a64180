//! Demonstrator hand keypoints to end-effector poses.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{quat_from_axes, quat_from_xyzw, quat_to_xyzw, vec3, Pose, Quat, Vec3};

/// Limit on |raw x · depth| beyond which the hand frame is considered ill-conditioned.
const NEAR_PARALLEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grip {
    #[default]
    Open,
    Close,
}

/// One recorded frame of hand keypoints in the camera frame (meters, seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandKeypoints {
    pub timestamp: f64,
    pub wrist: Vec3,
    pub index_base: Vec3,
    pub thumb_base: Vec3,
    /// Visibility of wrist, index base and thumb base.
    pub visibility: [bool; 3],
    pub grip: Grip,
}

impl HandKeypoints {
    pub fn fully_visible(&self) -> bool {
        self.visibility.iter().all(|&v| v)
            && [self.wrist, self.index_base, self.thumb_base]
                .iter()
                .all(|p| p.iter().all(|c| c.is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameId {
    Camera,
    Robot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndEffectorPose {
    pub pose: Pose,
    pub frame: FrameId,
}

/// Rigid camera-to-robot transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub rotation: Quat,
    pub translation: Vec3,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            rotation: Quat::identity(),
            translation: Vec3::zeros(),
        }
    }
}

impl Calibration {
    pub fn as_pose(&self) -> Pose {
        Pose::new(self.translation, self.rotation)
    }

    pub fn inverse(&self) -> Calibration {
        let inv = self.as_pose().inverse();
        Calibration {
            rotation: inv.orientation,
            translation: inv.position,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Calibration> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let rec: CalibrationRecord = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        rec.to_calibration().map_err(|e| Error::parse(path, e.to_string()))
    }
}

/// File layout: `{"rotation": [x, y, z, w], "translation": [x, y, z]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
}

impl CalibrationRecord {
    pub fn to_calibration(&self) -> Result<Calibration> {
        Ok(Calibration {
            rotation: quat_from_xyzw(self.rotation)?,
            translation: vec3(self.translation),
        })
    }
}

impl From<&Calibration> for CalibrationRecord {
    fn from(c: &Calibration) -> Self {
        CalibrationRecord {
            rotation: quat_to_xyzw(&c.rotation),
            translation: c.translation.into(),
        }
    }
}

/// Hand pose in the camera frame.
///
/// The wrist is the origin. The raw x axis bisects the wrist→index-base and wrist→thumb-base
/// directions; y is the camera depth axis; x is re-orthogonalised against y and z = x × y.
/// The sign of x is fixed so that z points from the thumb base towards the index base.
pub fn build_hand_frame(kp: &HandKeypoints, depth_axis: &Vec3) -> Result<EndEffectorPose> {
    if !kp.fully_visible() {
        return Err(Error::DegenerateFrame("required keypoint not visible".into()));
    }
    let y = depth_axis
        .try_normalize(1e-12)
        .ok_or_else(|| Error::validation("depth axis has zero length"))?;
    let to_index = kp.index_base - kp.wrist;
    let to_thumb = kp.thumb_base - kp.wrist;
    let (Some(a), Some(b)) = (to_index.try_normalize(1e-12), to_thumb.try_normalize(1e-12)) else {
        return Err(Error::DegenerateFrame("finger base coincides with the wrist".into()));
    };
    if a.cross(&b).norm() < 1e-9 {
        return Err(Error::DegenerateFrame("finger bases are collinear with the wrist".into()));
    }
    let raw = (a + b).normalize();
    if raw.dot(&y).abs() > NEAR_PARALLEL {
        return Err(Error::DegenerateFrame("bisector is nearly parallel to the depth axis".into()));
    }
    let mut x = (raw - y * raw.dot(&y)).normalize();
    let mut z = x.cross(&y);
    let thumb_to_index = kp.index_base - kp.thumb_base;
    let side = z.dot(&thumb_to_index.normalize());
    if side.abs() < 1e-9 {
        return Err(Error::DegenerateFrame(
            "thumb-to-index direction lies in the x/depth plane".into(),
        ));
    }
    if side < 0.0 {
        x = -x;
        z = -z;
    }
    Ok(EndEffectorPose {
        pose: Pose::new(kp.wrist, quat_from_axes(&x, &y, &z)),
        frame: FrameId::Camera,
    })
}

pub fn camera_to_robot(pose: &EndEffectorPose, cal: &Calibration) -> Result<EndEffectorPose> {
    if pose.frame != FrameId::Camera {
        return Err(Error::validation("camera_to_robot expects a camera-frame pose"));
    }
    Ok(EndEffectorPose {
        pose: cal.as_pose().compose(&pose.pose),
        frame: FrameId::Robot,
    })
}

/// Drops frames missing any required keypoint, then applies an exponential moving average
/// with weight `alpha` on the newest sample (`alpha = 1` disables smoothing).
pub fn filter_stable_keypoints(stream: &[HandKeypoints], alpha: f64) -> Vec<HandKeypoints> {
    let mut smoother = KeypointSmoother::new(alpha);
    stream.iter().filter_map(|kp| smoother.push(kp)).collect()
}

/// Streaming form of [`filter_stable_keypoints`].
#[derive(Debug, Clone)]
pub struct KeypointSmoother {
    alpha: f64,
    state: Option<[Vec3; 3]>,
}

impl KeypointSmoother {
    pub fn new(alpha: f64) -> Self {
        KeypointSmoother {
            alpha: alpha.clamp(0.0, 1.0),
            state: None,
        }
    }

    pub fn push(&mut self, kp: &HandKeypoints) -> Option<HandKeypoints> {
        if !kp.fully_visible() {
            return None;
        }
        let raw = [kp.wrist, kp.index_base, kp.thumb_base];
        let next = match self.state {
            None => raw,
            Some(prev) => {
                let a = self.alpha;
                [0, 1, 2].map(|i| raw[i] * a + prev[i] * (1.0 - a))
            }
        };
        self.state = Some(next);
        Some(HandKeypoints {
            wrist: next[0],
            index_base: next[1],
            thumb_base: next[2],
            ..*kp
        })
    }
}

/// One JSON Lines record of a trajectory file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeypointRecord {
    pub t: f64,
    pub wrist: [f64; 3],
    pub index_base: [f64; 3],
    pub thumb_base: [f64; 3],
    pub visible: [bool; 3],
    #[serde(default)]
    pub grip: Grip,
}

impl From<&KeypointRecord> for HandKeypoints {
    fn from(r: &KeypointRecord) -> Self {
        HandKeypoints {
            timestamp: r.t,
            wrist: vec3(r.wrist),
            index_base: vec3(r.index_base),
            thumb_base: vec3(r.thumb_base),
            visibility: r.visible,
            grip: r.grip,
        }
    }
}

impl From<&HandKeypoints> for KeypointRecord {
    fn from(k: &HandKeypoints) -> Self {
        KeypointRecord {
            t: k.timestamp,
            wrist: k.wrist.into(),
            index_base: k.index_base.into(),
            thumb_base: k.thumb_base.into(),
            visible: k.visibility,
            grip: k.grip,
        }
    }
}

/// Reads a JSON Lines trajectory; blank lines are skipped. Timestamps must not decrease.
pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<HandKeypoints>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trajectory(&text).map_err(|m| Error::parse(path, m))
}

pub fn parse_trajectory(text: &str) -> Result<Vec<HandKeypoints>, String> {
    let mut out: Vec<HandKeypoints> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: KeypointRecord = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        let kp = HandKeypoints::from(&rec);
        if out.last().is_some_and(|p| kp.timestamp < p.timestamp) {
            return Err(format!("line {}: timestamp goes backwards", i + 1));
        }
        out.push(kp);
    }
    Ok(out)
}

pub fn write_trajectory(path: impl AsRef<Path>, frames: &[HandKeypoints]) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    for k in frames {
        let line = serde_json::to_string(&KeypointRecord::from(k)).expect("record serializes");
        writeln!(f, "{line}").map_err(|e| Error::io(path, e))?;
    }
    f.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp_rotvec;
    use std::f64::consts::FRAC_PI_2;

    fn kp(wrist: Vec3, index: Vec3, thumb: Vec3) -> HandKeypoints {
        HandKeypoints {
            timestamp: 0.0,
            wrist,
            index_base: index,
            thumb_base: thumb,
            visibility: [true; 3],
            grip: Grip::Open,
        }
    }

    fn axes(p: &EndEffectorPose) -> [Vec3; 3] {
        let r = p.pose.orientation;
        [r * Vec3::x(), r * Vec3::y(), r * Vec3::z()]
    }

    #[test]
    fn symmetric_hand_gives_identity() {
        let k = kp(Vec3::zeros(), Vec3::new(1.0, 0.0, 1.0), Vec3::new(1.0, 0.0, -1.0));
        let p = build_hand_frame(&k, &Vec3::y()).unwrap();
        let [x, y, z] = axes(&p);
        assert!((x - Vec3::x()).norm() < 1e-12);
        assert!((y - Vec3::y()).norm() < 1e-12);
        assert!((z - Vec3::z()).norm() < 1e-12);
        assert_eq!(p.frame, FrameId::Camera);
    }

    #[test]
    fn swapping_fingers_flips_x() {
        let k = kp(Vec3::zeros(), Vec3::new(1.0, 0.0, -1.0), Vec3::new(1.0, 0.0, 1.0));
        let [x, y, z] = axes(&build_hand_frame(&k, &Vec3::y()).unwrap());
        assert!((x + Vec3::x()).norm() < 1e-12);
        assert!((y - Vec3::y()).norm() < 1e-12);
        assert!((z + Vec3::z()).norm() < 1e-12);
    }

    #[test]
    fn invisible_or_collinear_keypoints_fail() {
        let mut k = kp(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0));
        assert!(matches!(build_hand_frame(&k, &Vec3::y()), Err(Error::DegenerateFrame(_))));
        k.thumb_base = Vec3::new(1.0, 0.0, -1.0);
        k.visibility[2] = false;
        assert!(matches!(build_hand_frame(&k, &Vec3::y()), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn bisector_along_depth_is_rejected() {
        let k = kp(Vec3::zeros(), Vec3::new(0.1, 1.0, 0.0), Vec3::new(-0.1, 1.0, 0.0));
        assert!(build_hand_frame(&k, &Vec3::y()).is_err());
    }

    #[test]
    fn identity_and_translation_calibration() {
        let p = EndEffectorPose {
            pose: Pose::new(Vec3::new(0.1, 0.2, 0.3), exp_rotvec(&Vec3::new(0.1, 0.2, 0.3))),
            frame: FrameId::Camera,
        };
        let same = camera_to_robot(&p, &Calibration::default()).unwrap();
        assert_eq!(same.pose, p.pose);
        assert_eq!(same.frame, FrameId::Robot);
        let cal = Calibration {
            rotation: Quat::identity(),
            translation: Vec3::new(0.5, 0.0, 0.0),
        };
        let moved = camera_to_robot(&p, &cal).unwrap();
        assert!((moved.pose.position - Vec3::new(0.6, 0.2, 0.3)).norm() < 1e-15);
        assert_eq!(moved.pose.orientation, p.pose.orientation);
        assert!(camera_to_robot(&moved, &cal).is_err());
    }

    #[test]
    fn rotated_calibration_matches_homogeneous_matrix() {
        let cal = Calibration {
            rotation: exp_rotvec(&Vec3::new(0.0, 0.0, FRAC_PI_2)),
            translation: Vec3::new(1.0, 2.0, 3.0),
        };
        let p = EndEffectorPose {
            pose: Pose::new(Vec3::new(0.4, -0.1, 0.2), exp_rotvec(&Vec3::new(0.3, 0.0, 0.0))),
            frame: FrameId::Camera,
        };
        let out = camera_to_robot(&p, &cal).unwrap();
        // 4x4 oracle: [Rz(90) | t] * [R_p | p]
        let t_cal = nalgebra::Matrix4::new(
            0.0, -1.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 2.0, //
            0.0, 0.0, 1.0, 3.0, //
            0.0, 0.0, 0.0, 1.0,
        );
        let mut t_p = nalgebra::Matrix4::identity();
        t_p.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(p.pose.orientation.to_rotation_matrix().matrix());
        t_p.fixed_view_mut::<3, 1>(0, 3).copy_from(&p.pose.position);
        let expect = t_cal * t_p;
        let got_r = out.pose.orientation.to_rotation_matrix().into_inner();
        assert!((got_r - expect.fixed_view::<3, 3>(0, 0)).norm() < 1e-12);
        assert!((out.pose.position - expect.fixed_view::<3, 1>(0, 3)).norm() < 1e-12);
    }

    #[test]
    fn visibility_filter_drops_frames() {
        let mut frames: Vec<_> = (0..5)
            .map(|i| HandKeypoints {
                timestamp: i as f64 * 0.1,
                ..kp(Vec3::zeros(), Vec3::x(), Vec3::y())
            })
            .collect();
        frames[2].visibility[2] = false;
        let out = filter_stable_keypoints(&frames, 1.0);
        let ts: Vec<_> = out.iter().map(|k| k.timestamp).collect();
        assert_eq!(ts, vec![0.0, 0.1, 0.30000000000000004, 0.4]);
    }

    #[test]
    fn alpha_one_is_identity() {
        let frames: Vec<_> = (0..4)
            .map(|i| HandKeypoints {
                timestamp: i as f64,
                ..kp(Vec3::new(i as f64, 0.0, 0.0), Vec3::new(0.0, i as f64, 1.0), Vec3::z())
            })
            .collect();
        assert_eq!(filter_stable_keypoints(&frames, 1.0), frames);
    }

    #[test]
    fn ema_matches_recurrence_on_a_step() {
        let frames: Vec<_> = (0..6)
            .map(|i| HandKeypoints {
                timestamp: i as f64,
                ..kp(Vec3::new(if i < 2 { 0.0 } else { 1.0 }, 0.0, 0.0), Vec3::x(), Vec3::y())
            })
            .collect();
        let out = filter_stable_keypoints(&frames, 0.5);
        // s0 = 0, s1 = 0, then s_k = 1 - 0.5^(k-1) for k >= 2
        for (k, f) in out.iter().enumerate() {
            let expect = if k < 2 { 0.0 } else { 1.0 - 0.5f64.powi(k as i32 - 1) };
            assert!((f.wrist.x - expect).abs() < 1e-15, "frame {k}");
        }
    }

    #[test]
    fn trajectory_text_roundtrip() {
        let text = r#"{"t":0.0,"wrist":[0,0,0],"index_base":[1,0,1],"thumb_base":[1,0,-1],"visible":[true,true,true],"grip":"open"}
{"t":0.1,"wrist":[0,0,0],"index_base":[1,0,1],"thumb_base":[1,0,-1],"visible":[true,false,true],"grip":"close"}
"#;
        let frames = parse_trajectory(text).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[1].grip, Grip::Close);
        assert!(!frames[1].fully_visible());
        assert!(parse_trajectory(&text.lines().rev().collect::<Vec<_>>().join("\n")).is_err());
    }
}
