//! Kinematic bicycle model of an Ackermann-steered vehicle.
//!
//! The vehicle state is a planar pose `(x, y, θ)` driven by a speed `v` and a
//! front-steering angle `δ`:
//!
//! ```text
//! ẋ = v cos(θ)
//! ẏ = v sin(θ)
//! θ̇ = (v / L) tan(δ)
//! ```
//!
//! where `L` is the wheelbase. [`step_euler`] is the simulation integrator,
//! [`step_rk4`] a higher-order alternative, and [`arc_closed_form`] the exact
//! solution for constant controls (every constant-control trajectory is a
//! straight line or a circular arc), which the tests use as an oracle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar pose. Heading is always wrapped to `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    /// Euclidean distance from this pose's position to a point.
    pub fn distance_to(&self, point: (f64, f64)) -> f64 {
        (self.x - point.0).hypot(self.y - point.1)
    }
}

/// Wrap an angle to `(-π, π]`.
///
/// Note the closed upper end: an input of exactly `-π` (or `π`) comes back
/// as `π`, so "directly behind" has a single representation.
pub fn wrap_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI); // [0, 2π)
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Physical limits and step size of the simulated vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// Distance between front and rear axles (m).
    pub wheelbase: f64,
    /// Maximum forward speed (m/s). Reverse is not modeled.
    pub v_max: f64,
    /// Maximum steering magnitude (rad), strictly below π/2 so tan(δ) stays finite.
    pub delta_max: f64,
    /// Collision radius of the vehicle disc (m).
    pub footprint_radius: f64,
    /// Simulation step (s).
    pub dt: f64,
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("wheelbase", self.wheelbase),
            ("v_max", self.v_max),
            ("delta_max", self.delta_max),
            ("footprint_radius", self.footprint_radius),
            ("dt", self.dt),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::config(format!(
                    "vehicle.{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if self.delta_max >= PI / 2.0 {
            return Err(Error::config(format!(
                "vehicle.delta_max must be < π/2, got {}",
                self.delta_max
            )));
        }
        Ok(())
    }
}

impl Default for VehicleParams {
    /// Desk-scale defaults: a 0.5 m wheelbase cart that crosses a 20 m map
    /// in well under the episode step cap.
    fn default() -> Self {
        VehicleParams {
            wheelbase: 0.5,
            v_max: 1.0,
            delta_max: 0.5,
            footprint_radius: 0.3,
            dt: 0.1,
        }
    }
}

/// A speed / steering command. Valid once clamped: `0 ≤ v ≤ v_max`,
/// `|delta| ≤ delta_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlAction {
    pub v: f64,
    pub delta: f64,
}

impl ControlAction {
    pub fn new(v: f64, delta: f64) -> Self {
        ControlAction { v, delta }
    }
}

/// Clamp a raw command into the vehicle's admissible range.
///
/// Speed saturates at `[0, v_max]` (no reverse), steering at `±delta_max`.
/// Non-finite inputs are rejected rather than silently clamped.
pub fn clamp_action(raw: ControlAction, params: &VehicleParams) -> Result<ControlAction> {
    if !raw.v.is_finite() || !raw.delta.is_finite() {
        return Err(Error::InvalidAction(format!(
            "non-finite control (v={}, delta={})",
            raw.v, raw.delta
        )));
    }
    Ok(ControlAction {
        v: raw.v.clamp(0.0, params.v_max),
        delta: raw.delta.clamp(-params.delta_max, params.delta_max),
    })
}

/// Time derivative of the pose under a constant action.
fn derivative(pose: &Pose, action: &ControlAction, params: &VehicleParams) -> (f64, f64, f64) {
    (
        action.v * pose.theta.cos(),
        action.v * pose.theta.sin(),
        action.v / params.wheelbase * action.delta.tan(),
    )
}

/// One explicit-Euler step of the kinematics.
pub fn step_euler(pose: &Pose, action: &ControlAction, params: &VehicleParams, dt: f64) -> Pose {
    let (dx, dy, dtheta) = derivative(pose, action, params);
    Pose {
        x: pose.x + dx * dt,
        y: pose.y + dy * dt,
        theta: wrap_angle(pose.theta + dtheta * dt),
    }
}

/// One classical 4th-order Runge–Kutta step with the action held constant.
pub fn step_rk4(pose: &Pose, action: &ControlAction, params: &VehicleParams, dt: f64) -> Pose {
    // Heading rate is state-independent, so only x and y need the full
    // four-stage treatment; θ integrates exactly.
    let eval = |theta: f64| -> (f64, f64, f64) {
        (
            action.v * theta.cos(),
            action.v * theta.sin(),
            action.v / params.wheelbase * action.delta.tan(),
        )
    };
    let k1 = eval(pose.theta);
    let k2 = eval(pose.theta + 0.5 * dt * k1.2);
    let k3 = eval(pose.theta + 0.5 * dt * k2.2);
    let k4 = eval(pose.theta + dt * k3.2);
    Pose {
        x: pose.x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y: pose.y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        theta: wrap_angle(pose.theta + dt / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2)),
    }
}

/// Exact pose after holding `action` for `t` seconds.
///
/// With δ = 0 the trajectory is a straight segment of length `v·t`.
/// Otherwise it is a circular arc of radius `R = v/ω`, `ω = (v/L)·tan(δ)`:
///
/// ```text
/// θ' = θ + ωt
/// x' = x + R (sin θ' - sin θ)
/// y' = y - R (cos θ' - cos θ)
/// ```
pub fn arc_closed_form(pose: &Pose, action: &ControlAction, params: &VehicleParams, t: f64) -> Pose {
    let omega = action.v / params.wheelbase * action.delta.tan();
    if omega == 0.0 {
        return Pose {
            x: pose.x + action.v * t * pose.theta.cos(),
            y: pose.y + action.v * t * pose.theta.sin(),
            theta: pose.theta,
        };
    }
    let radius = action.v / omega;
    let theta_end = pose.theta + omega * t;
    Pose {
        x: pose.x + radius * (theta_end.sin() - pose.theta.sin()),
        y: pose.y - radius * (theta_end.cos() - pose.theta.cos()),
        theta: wrap_angle(theta_end),
    }
}
