//! Episodic goal-reaching environment.
//!
//! Wraps the vehicle kinematics and an obstacle world into the usual
//! reset/step MDP loop. Each episode starts at the map's fixed start pose
//! with a freshly sampled random goal; it ends when the vehicle reaches the
//! goal disc, hits something, or runs out of steps.
//!
//! The observation is a flat vector of `n_beams + 4` components:
//! normalized lidar ranges, normalized goal distance, goal bearing relative
//! to the heading, and the previous (normalized) action. Rewards are shaped
//! by progress toward the goal, with fixed terminal bonuses/penalties that
//! replace the shaped term.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vehicle::{clamp_action, step_euler, wrap_angle, ControlAction, Pose, VehicleParams};
use crate::world::WorldMap;

/// How an episode step left the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Running,
    ReachedGoal,
    Collided,
    TimedOut,
}

impl Outcome {
    pub fn is_terminal(self) -> bool {
        self != Outcome::Running
    }

    /// Stable lowercase name used in the metrics CSV.
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Running => "running",
            Outcome::ReachedGoal => "reached_goal",
            Outcome::Collided => "collided",
            Outcome::TimedOut => "timed_out",
        }
    }
}

impl std::str::FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "running" => Ok(Outcome::Running),
            "reached_goal" => Ok(Outcome::ReachedGoal),
            "collided" => Ok(Outcome::Collided),
            "timed_out" => Ok(Outcome::TimedOut),
            other => Err(Error::Parse {
                line: None,
                message: format!("unknown outcome `{other}`"),
            }),
        }
    }
}

/// Observation assembled from the sensors and episode state.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Lidar ranges divided by max_range, each in (0, 1].
    pub lidar_norm: Vec<f64>,
    /// Distance to goal over the map diagonal, in [0, 1].
    pub goal_distance_norm: f64,
    /// Goal direction relative to the heading, in (-π, π].
    pub goal_bearing: f64,
    /// Previous action as (v/v_max, δ/δ_max).
    pub last_action: [f64; 2],
}

impl Observation {
    /// Logical component count: lidar beams plus distance, bearing, and the
    /// two last-action values.
    pub fn dim(&self) -> usize {
        self.lidar_norm.len() + 4
    }

    /// Width of [`Observation::to_vector`] for a beam count.
    pub fn encoded_dim(n_beams: usize) -> usize {
        n_beams + 5
    }

    /// Flatten into the network input layout.
    ///
    /// The bearing angle enters as (sin, cos) rather than raw radians: the
    /// policy must behave identically on both sides of the ±π wrap (a goal
    /// dead behind), and a raw angle input puts a jump discontinuity exactly
    /// there.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::encoded_dim(self.lidar_norm.len()));
        v.extend_from_slice(&self.lidar_norm);
        v.push(self.goal_distance_norm);
        v.push(self.goal_bearing.sin());
        v.push(self.goal_bearing.cos());
        v.push(self.last_action[0]);
        v.push(self.last_action[1]);
        v
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub outcome: Outcome,
}

/// Range sensor geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub n_beams: usize,
    pub fov: f64,
    pub max_range: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            n_beams: 16,
            fov: std::f64::consts::PI,
            max_range: 10.0,
        }
    }
}

/// Reward shaping coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardCoeffs {
    /// Terminal bonus for reaching the goal disc.
    pub r_goal: f64,
    /// Terminal penalty (applied negated) for a collision.
    pub r_crash: f64,
    /// Gain on per-step progress toward the goal.
    pub k_progress: f64,
    /// Constant per-step cost discouraging dawdling.
    pub step_cost: f64,
}

impl Default for RewardCoeffs {
    fn default() -> Self {
        RewardCoeffs {
            r_goal: 100.0,
            r_crash: 100.0,
            k_progress: 10.0,
            step_cost: 0.05,
        }
    }
}

/// Full environment configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub vehicle: VehicleParams,
    pub sensor: SensorConfig,
    pub reward: RewardCoeffs,
    /// Episode step cap; hitting it ends the episode as `TimedOut`.
    pub max_steps: usize,
    /// Radius of the goal disc (m).
    pub goal_radius: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            vehicle: VehicleParams::default(),
            sensor: SensorConfig::default(),
            reward: RewardCoeffs::default(),
            max_steps: 500,
            goal_radius: 0.5,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        if self.max_steps < 1 {
            return Err(Error::config("env.max_steps must be >= 1"));
        }
        if self.sensor.n_beams < 1 {
            return Err(Error::config("sensor.n_beams must be >= 1"));
        }
        if !(self.sensor.fov > 0.0) || !(self.sensor.max_range > 0.0) {
            return Err(Error::config("sensor.fov and sensor.max_range must be > 0"));
        }
        if !(self.goal_radius > 0.0) {
            return Err(Error::config("env.goal_radius must be > 0"));
        }
        Ok(())
    }

    /// Encoded observation vector width for this configuration.
    pub fn obs_dim(&self) -> usize {
        Observation::encoded_dim(self.sensor.n_beams)
    }
}

/// Shaped step reward.
///
/// Terminal outcomes replace the shaped term: goal arrival pays `+r_goal`,
/// collision pays `-r_crash`. Otherwise (including timeout) the reward is
/// `k_progress·(prev_distance - new_distance) - step_cost`.
pub fn reward(prev_distance: f64, new_distance: f64, outcome: Outcome, coeffs: &RewardCoeffs) -> f64 {
    match outcome {
        Outcome::ReachedGoal => coeffs.r_goal,
        Outcome::Collided => -coeffs.r_crash,
        Outcome::Running | Outcome::TimedOut => {
            coeffs.k_progress * (prev_distance - new_distance) - coeffs.step_cost
        }
    }
}

/// Evenly spaced steering table for the discrete-action agents: `n_steer`
/// actions covering `[-δ_max, +δ_max]` at a fixed speed. `n_steer` must be
/// odd so straight-ahead (δ = 0) is always available.
pub fn discrete_action_table(
    n_steer: usize,
    v_fixed: f64,
    params: &VehicleParams,
) -> Result<Vec<ControlAction>> {
    if n_steer < 2 || n_steer % 2 == 0 {
        return Err(Error::config(format!(
            "agent.n_steer must be odd and >= 3, got {n_steer}"
        )));
    }
    Ok((0..n_steer)
        .map(|i| {
            let frac = i as f64 / (n_steer - 1) as f64;
            ControlAction::new(v_fixed, -params.delta_max + 2.0 * params.delta_max * frac)
        })
        .collect())
}

/// One vehicle navigating one world. Mutable episode state lives here; the
/// map itself is immutable.
#[derive(Debug, Clone)]
pub struct NavEnv {
    map: WorldMap,
    config: EnvConfig,
    pose: Pose,
    goal: (f64, f64),
    goal_distance: f64,
    last_action_norm: [f64; 2],
    steps: usize,
    done: bool,
}

impl NavEnv {
    pub fn new(map: WorldMap, config: EnvConfig) -> Result<Self> {
        config.validate()?;
        map.validate(config.vehicle.footprint_radius)?;
        let pose = map.start_pose();
        let goal = map.goal_point();
        let goal_distance = pose.distance_to(goal);
        Ok(NavEnv {
            map,
            config,
            pose,
            goal,
            goal_distance,
            last_action_norm: [0.0, 0.0],
            steps: 0,
            done: true, // not runnable until the first reset
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn map(&self) -> &WorldMap {
        &self.map
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn goal(&self) -> (f64, f64) {
        self.goal
    }

    pub fn obs_dim(&self) -> usize {
        self.config.obs_dim()
    }

    /// Steps taken in the current episode.
    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// Begin a new episode: vehicle back at the fixed start, fresh random
    /// goal drawn from `rng`.
    pub fn reset(&mut self, rng: &mut impl Rng) -> Result<Observation> {
        let clearance = self.config.vehicle.footprint_radius;
        let min_start_distance = 2.0 * self.config.goal_radius;
        self.goal = self.map.sample_goal(rng, clearance, min_start_distance)?;
        self.pose = self.map.start_pose();
        self.goal_distance = self.pose.distance_to(self.goal);
        self.last_action_norm = [0.0, 0.0];
        self.steps = 0;
        self.done = false;
        Ok(self.observe())
    }

    /// Advance one step. Errors if the episode has already terminated.
    pub fn step(&mut self, raw: ControlAction) -> Result<StepResult> {
        if self.done {
            return Err(Error::InvalidState(
                "episode is finished; call reset before stepping".into(),
            ));
        }
        let v = &self.config.vehicle;
        let action = clamp_action(raw, v)?;
        self.pose = step_euler(&self.pose, &action, v, v.dt);
        self.steps += 1;

        let prev_distance = self.goal_distance;
        let new_distance = self.pose.distance_to(self.goal);
        let outcome = if self.map.collides((self.pose.x, self.pose.y), v.footprint_radius) {
            Outcome::Collided
        } else if new_distance <= self.config.goal_radius {
            Outcome::ReachedGoal
        } else if self.steps >= self.config.max_steps {
            Outcome::TimedOut
        } else {
            Outcome::Running
        };

        self.goal_distance = new_distance;
        self.last_action_norm = [action.v / v.v_max, action.delta / v.delta_max];
        self.done = outcome.is_terminal();

        Ok(StepResult {
            observation: self.observe(),
            reward: reward(prev_distance, new_distance, outcome, &self.config.reward),
            done: self.done,
            outcome,
        })
    }

    /// Assemble the observation for the current pose and goal.
    pub fn observe(&self) -> Observation {
        let s = &self.config.sensor;
        let scan = self.map.lidar_scan(&self.pose, s.n_beams, s.fov, s.max_range);
        // The terminal observation of a collided episode can sit marginally
        // outside the arena; floor/clamp keep the declared ranges intact.
        let lidar_norm = scan
            .ranges
            .iter()
            .map(|r| (r / s.max_range).clamp(1e-9, 1.0))
            .collect();
        let bearing = wrap_angle(
            (self.goal.1 - self.pose.y).atan2(self.goal.0 - self.pose.x) - self.pose.theta,
        );
        Observation {
            lidar_norm,
            goal_distance_norm: (self.goal_distance / self.map.diagonal()).clamp(0.0, 1.0),
            goal_bearing: bearing,
            last_action: self.last_action_norm,
        }
    }
}
