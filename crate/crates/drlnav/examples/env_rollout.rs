//! The environment loop without any learning.
//!
//! Runs a hand-written proportional steering controller (steer toward the
//! goal bearing, slow down when obstacles are close) for a few episodes and
//! prints the per-episode outcome. Useful as a sanity baseline: the scripted
//! controller reaches open goals but has no obstacle-avoidance strategy
//! beyond braking.
//!
//! ```bash
//! cargo run --release --example env_rollout
//! ```

use drlnav::env::{EnvConfig, NavEnv};
use drlnav::vehicle::ControlAction;
use drlnav::world::generate_world;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let map = generate_world(20.0, 20.0, 3, 5, 7).expect("world");
    let config = EnvConfig::default();
    let mut env = NavEnv::new(map, config).expect("env");
    let mut goal_rng = ChaCha12Rng::seed_from_u64(1);

    for episode in 1..=10 {
        let mut obs = env.reset(&mut goal_rng).expect("reset");
        let mut total_reward = 0.0;
        let (steps, outcome) = loop {
            // steer proportionally toward the goal, brake near obstacles
            let min_range = obs.lidar_norm.iter().cloned().fold(f64::INFINITY, f64::min);
            let v = if min_range < 0.08 { 0.3 } else { 1.0 };
            let delta = (obs.goal_bearing * 1.5).clamp(-0.5, 0.5);
            let step = env.step(ControlAction::new(v, delta)).expect("step");
            total_reward += step.reward;
            obs = step.observation;
            if step.done {
                break (env.steps_taken(), step.outcome);
            }
        };
        println!(
            "episode {episode:2}: {outcome:?} after {steps:3} steps, total reward {total_reward:8.2}"
        );
    }
}
