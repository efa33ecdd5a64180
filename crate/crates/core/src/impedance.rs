//! Hybrid position/impedance control.
//!
//! The correction `x` obeys `M ẍ + D ẋ + K x = F` on six decoupled axes (three translational,
//! three rotational) and is added to the nominal target to form the reference pose.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hand::EndEffectorPose;
use crate::math::{exp_rotvec, log_rotvec, Pose, Vec3};

pub type Wrench = [f64; 6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImpedanceParams {
    pub mass: [f64; 6],
    pub damping: [f64; 6],
    pub stiffness: [f64; 6],
    /// Largest accepted integration step.
    pub dt_max: f64,
}

impl Default for ImpedanceParams {
    fn default() -> Self {
        ImpedanceParams::split((2.0, 90.0, 1000.0), (0.05, 2.0, 20.0))
    }
}

impl ImpedanceParams {
    /// Same `(M, D, K)` on the three translational axes and another on the three rotational ones.
    pub fn split(translational: (f64, f64, f64), rotational: (f64, f64, f64)) -> Self {
        let pick = |f: fn((f64, f64, f64)) -> f64| {
            let (t, r) = (f(translational), f(rotational));
            [t, t, t, r, r, r]
        };
        ImpedanceParams {
            mass: pick(|p| p.0),
            damping: pick(|p| p.1),
            stiffness: pick(|p| p.2),
            dt_max: 0.01,
        }
    }

    pub fn uniform(mass: f64, damping: f64, stiffness: f64) -> Self {
        ImpedanceParams::split((mass, damping, stiffness), (mass, damping, stiffness))
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.mass.iter().chain(&self.damping).chain(&self.stiffness);
        if all.clone().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::validation("impedance M, D and K must be positive and finite"));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::validation("impedance dt_max must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImpedanceState {
    pub x: [f64; 6],
    pub x_dot: [f64; 6],
}

impl ImpedanceState {
    pub fn translation(&self) -> Vec3 {
        Vec3::new(self.x[0], self.x[1], self.x[2])
    }

    pub fn rotation(&self) -> Vec3 {
        Vec3::new(self.x[3], self.x[4], self.x[5])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    PositionOnly,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlTarget {
    pub nominal: EndEffectorPose,
    pub reference: EndEffectorPose,
    pub mode: ControlMode,
}

/// Advances `M ẍ + D ẋ + K x = F` by `dt` on each axis, holding `F` constant over the step.
///
/// Every axis is a linear system `z' = A z + b` with `z = (x, ẋ)`, so the step is taken exactly:
/// `z ← z* + exp(A dt) (z − z*)` around the equilibrium `z* = (F/K, 0)`.
pub fn step_impedance(state: &ImpedanceState, params: &ImpedanceParams, wrench: &Wrench, dt: f64) -> Result<ImpedanceState> {
    if !(dt > 0.0) || dt > params.dt_max {
        return Err(Error::validation(format!("dt = {dt} outside (0, {}]", params.dt_max)));
    }
    if wrench.iter().any(|f| !f.is_finite()) {
        return Err(Error::validation("wrench has non-finite components"));
    }
    let mut next = *state;
    for (i, f) in wrench.iter().enumerate() {
        let (m, d, k) = (params.mass[i], params.damping[i], params.stiffness[i]);
        let a = Matrix2::new(0.0, 1.0, -k / m, -d / m);
        let phi = (a * dt).exp();
        let rest = f / k;
        let z = phi * Vector2::new(state.x[i] - rest, state.x_dot[i]);
        next.x[i] = rest + z[0];
        next.x_dot[i] = z[1];
    }
    Ok(next)
}

/// `x_ref = x̂ + x`: translation is added, rotation is applied as `exp(x_rot) · q_nominal`.
pub fn reference_position(nominal: &EndEffectorPose, state: &ImpedanceState) -> EndEffectorPose {
    let rot = state.rotation();
    let orientation = if rot == Vec3::zeros() {
        nominal.pose.orientation
    } else {
        exp_rotvec(&rot) * nominal.pose.orientation
    };
    EndEffectorPose {
        pose: Pose::new(nominal.pose.position + state.translation(), orientation),
        frame: nominal.frame,
    }
}

pub fn hybrid_target(
    mode: ControlMode,
    nominal: &EndEffectorPose,
    state: &ImpedanceState,
    params: &ImpedanceParams,
    wrench: &Wrench,
    dt: f64,
) -> Result<(ControlTarget, ImpedanceState)> {
    match mode {
        ControlMode::PositionOnly => Ok((
            ControlTarget {
                nominal: *nominal,
                reference: *nominal,
                mode,
            },
            *state,
        )),
        ControlMode::Hybrid => {
            let next = step_impedance(state, params, wrench, dt)?;
            Ok((
                ControlTarget {
                    nominal: *nominal,
                    reference: reference_position(nominal, &next),
                    mode,
                },
                next,
            ))
        }
    }
}

/// Per-arm controller that carries the impedance state across control ticks.
///
/// When the nominal target changes, the correction is re-expressed relative to the new nominal
/// so that the reference pose stays continuous; the spring then draws it toward the new target
/// at the rate set by `M`, `D` and `K` instead of jumping.
#[derive(Debug, Clone)]
pub struct Controller {
    pub mode: ControlMode,
    pub params: ImpedanceParams,
    state: ImpedanceState,
    last: Option<(Pose, Pose)>,
}

impl Controller {
    pub fn new(mode: ControlMode, params: ImpedanceParams) -> Result<Self> {
        params.validate()?;
        Ok(Controller {
            mode,
            params,
            state: ImpedanceState::default(),
            last: None,
        })
    }

    pub fn state(&self) -> &ImpedanceState {
        &self.state
    }

    pub fn update(&mut self, nominal: &EndEffectorPose, wrench: &Wrench, dt: f64) -> Result<ControlTarget> {
        if self.mode == ControlMode::Hybrid {
            if let Some((prev_nominal, prev_reference)) = self.last {
                if prev_nominal != nominal.pose {
                    self.rebase(&prev_reference, &nominal.pose);
                }
            }
        }
        let (target, next) = hybrid_target(self.mode, nominal, &self.state, &self.params, wrench, dt)?;
        self.state = next;
        self.last = Some((nominal.pose, target.reference.pose));
        Ok(target)
    }

    fn rebase(&mut self, reference: &Pose, nominal: &Pose) {
        let dp = reference.position - nominal.position;
        let dr = log_rotvec(&(reference.orientation * nominal.orientation.inverse()));
        for i in 0..3 {
            self.state.x[i] = dp[i];
            self.state.x[i + 3] = dr[i];
        }
    }
}
