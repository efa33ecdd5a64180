//! Affordance-guided dual-arm disassembly in simulation.
//!
//! The crate covers grasp-candidate generation on triangle meshes, snap-fit disassembly
//! direction estimation, hand-keypoint teleoperation mapping, hybrid position/impedance
//! control, a quasi-static plant with the usual failure modes, and the evaluation harness.

pub mod config;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod grasp;
pub mod hand;
pub mod hooks;
pub mod impedance;
pub mod math;
pub mod mesh;
pub mod metrics;
pub mod sim;

pub use config::{LoadedScene, SceneConfig};
pub use error::{Error, Result};
pub use experiment::{emit_report, run_experiment, ExperimentConfig, ExperimentReport, MethodSpec};
pub use grasp::{
    generate_grasp_candidates, grasp_similarity, snap_to_grasp, GraspCandidate, GripperSpec, SamplingParams,
    SimilarityThresholds,
};
pub use hand::{build_hand_frame, camera_to_robot, filter_stable_keypoints, Calibration, EndEffectorPose, FrameId, Grip, HandKeypoints};
pub use hooks::{decompose_hook_force, estimate_disassembly_direction, required_extraction_force, HookForceDecomposition, SnapFitHook};
pub use impedance::{hybrid_target, reference_position, step_impedance, ControlMode, ControlTarget, Controller, ImpedanceParams, ImpedanceState, Wrench};
pub use math::{Pose, Quat, Vec3};
pub use mesh::{check_gripper_collision, cluster_facets, load_mesh, ray_opposite_contact, sample_contact_points, ContactPoint, FacetCluster, TriMesh};
pub use metrics::{normalize_timeline, pose_deviation, quaternion_angle, success_rate, PoseSample};
pub use sim::{detect_failure, run_trial, step_scene, ControllerSpec, FailureLimits, FailureReason, NoiseModel, PhysicsParams, Scene, TrialResult};
