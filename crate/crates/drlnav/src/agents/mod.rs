//! Learning agents: DDPG for continuous control, DQN/DDQN over a discrete
//! steering table, plus the experience replay and exploration machinery they
//! share.

mod ddpg;
mod dqn;
mod noise;

pub use ddpg::{actor_ascent_step, critic_regression_step, critic_targets, map_normalized_action, DdpgAgent};
pub use dqn::{epsilon_greedy, td_targets, DqnAgent, TargetSync};
pub use noise::OuNoise;

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(s, a, r, s', done)` tuple. The action representation differs per
/// agent family: `[f64; 2]` normalized continuous actions for DDPG, a table
/// index for DQN/DDQN.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<A> {
    pub obs: Vec<f64>,
    pub action: A,
    pub reward: f64,
    pub next_obs: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity FIFO store with uniform sampling (with replacement).
#[derive(Debug, Clone)]
pub struct ReplayBuffer<A> {
    capacity: usize,
    storage: VecDeque<Transition<A>>,
}

impl<A> ReplayBuffer<A> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "replay capacity must be >= 1");
        ReplayBuffer {
            capacity,
            storage: VecDeque::with_capacity(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Append a transition, evicting the oldest one once full.
    pub fn push(&mut self, transition: Transition<A>) {
        if self.storage.len() == self.capacity {
            self.storage.pop_front();
        }
        self.storage.push_back(transition);
    }

    /// Oldest-to-newest iteration.
    pub fn iter(&self) -> impl Iterator<Item = &Transition<A>> {
        self.storage.iter()
    }

    /// Draw `batch_size` transitions uniformly with replacement, or `None`
    /// while the buffer holds fewer than `batch_size` items (the caller
    /// skips its update step).
    pub fn sample(&self, batch_size: usize, rng: &mut impl Rng) -> Option<Vec<&Transition<A>>> {
        if self.storage.len() < batch_size {
            return None;
        }
        Some(
            (0..batch_size)
                .map(|_| &self.storage[rng.random_range(0..self.storage.len())])
                .collect(),
        )
    }
}

/// Agent hyperparameters with their training defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    /// Discount rate γ.
    pub gamma: f64,
    /// ε-greedy exploration rate for DQN/DDQN (held constant).
    pub epsilon: f64,
    /// Adam learning rate α for value regression (critic / Q network).
    pub alpha: f64,
    /// Adam learning rate for the DDPG actor. Policy ascent needs a much
    /// cooler rate than value regression: at α=0.01 the tanh head saturates
    /// within the first few episodes and its gradient dies.
    pub actor_alpha: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Soft-update retention: the fraction of the target network kept each
    /// update (τ = 1 freezes the target, τ = 0 copies the online net).
    pub tau: f64,
    /// Hidden layer widths for actor, critic, and Q networks.
    pub hidden: Vec<usize>,
    /// Number of discrete steering bins for DQN/DDQN (odd).
    pub n_steer: usize,
    /// Optional hard target sync period (gradient steps); when unset the
    /// target tracks softly with τ every update.
    pub hard_sync_every: Option<u64>,
    /// Environment steps per gradient update. With the small replay buffer
    /// a 1:1 ratio replays each transition so often the critic overfits the
    /// most recent episodes; spacing updates out keeps the data fresher per
    /// gradient step.
    pub update_every: usize,
    pub ou_theta: f64,
    pub ou_sigma: f64,
    /// Per-episode multiplier on the OU diffusion scale.
    pub ou_sigma_decay: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.9,
            epsilon: 0.05,
            alpha: 0.001,
            actor_alpha: 0.0003,
            batch_size: 64,
            buffer_capacity: 5000,
            tau: 0.99,
            hidden: vec![64, 64],
            n_steer: 5,
            hard_sync_every: None,
            update_every: 1,
            ou_theta: 0.15,
            ou_sigma: 0.2,
            ou_sigma_decay: 0.995,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value, lo, hi) in [
            ("gamma", self.gamma, 0.0, 1.0),
            ("epsilon", self.epsilon, 0.0, 1.0),
            ("tau", self.tau, 0.0, 1.0),
        ] {
            if !(lo..=hi).contains(&value) {
                return Err(Error::config(format!(
                    "agent.{name} must be in [{lo}, {hi}], got {value}"
                )));
            }
        }
        if !(self.alpha > 0.0) {
            return Err(Error::config("agent.alpha must be > 0"));
        }
        if !(self.actor_alpha > 0.0) {
            return Err(Error::config("agent.actor_alpha must be > 0"));
        }
        if self.batch_size < 1 {
            return Err(Error::config("agent.batch_size must be >= 1"));
        }
        if self.buffer_capacity < self.batch_size {
            return Err(Error::config(
                "agent.buffer_capacity must be >= agent.batch_size",
            ));
        }
        if self.hidden.is_empty() || self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::config("agent.hidden must be non-empty positive widths"));
        }
        if self.update_every < 1 {
            return Err(Error::config("agent.update_every must be >= 1"));
        }
        if self.n_steer < 3 || self.n_steer % 2 == 0 {
            return Err(Error::config(format!(
                "agent.n_steer must be odd and >= 3, got {}",
                self.n_steer
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn t(id: f64) -> Transition<usize> {
        Transition {
            obs: vec![id],
            action: 0,
            reward: id,
            next_obs: vec![id],
            done: false,
        }
    }

    #[test]
    fn push_grows_until_capacity() {
        let mut buf = ReplayBuffer::new(3);
        buf.push(t(1.0));
        assert_eq!(buf.len(), 1);
        buf.push(t(2.0));
        buf.push(t(3.0));
        assert_eq!(buf.len(), 3);
    }

    #[test]
    fn push_evicts_oldest_in_order() {
        let mut buf = ReplayBuffer::new(3);
        for i in 1..=4 {
            buf.push(t(i as f64));
        }
        let rewards: Vec<f64> = buf.iter().map(|t| t.reward).collect();
        assert_eq!(rewards, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn capacity_5000_holds_exactly_5000() {
        let mut buf = ReplayBuffer::new(5000);
        for i in 0..5000 {
            buf.push(t(i as f64));
        }
        assert_eq!(buf.len(), 5000);
        buf.push(t(5000.0));
        assert_eq!(buf.len(), 5000);
        assert_eq!(buf.iter().next().unwrap().reward, 1.0);
    }

    #[test]
    fn sample_not_ready_below_batch_size() {
        let mut buf = ReplayBuffer::new(100);
        for i in 0..63 {
            buf.push(t(i as f64));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(buf.sample(64, &mut rng).is_none());
        buf.push(t(63.0));
        assert_eq!(buf.sample(64, &mut rng).unwrap().len(), 64);
    }

    #[test]
    fn sample_is_deterministic_per_rng_state() {
        let mut buf = ReplayBuffer::new(10);
        for i in 0..10 {
            buf.push(t(i as f64));
        }
        let draw = |seed| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            buf.sample(5, &mut rng)
                .unwrap()
                .iter()
                .map(|t| t.reward)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
    }

    #[test]
    fn sample_frequencies_are_uniform() {
        // 10,000 draws from a 10-slot buffer: every index within 3σ of the
        // expected 1000 (σ = √(n·p·(1-p)) = 30).
        let mut buf = ReplayBuffer::new(10);
        for i in 0..10 {
            buf.push(t(i as f64));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut counts = [0usize; 10];
        for _ in 0..1000 {
            for item in buf.sample(10, &mut rng).unwrap() {
                counts[item.reward as usize] += 1;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            assert!(
                (c as f64 - 1000.0).abs() <= 90.0,
                "index {i} drawn {c} times"
            );
        }
    }

    #[test]
    fn agent_config_validation() {
        assert!(AgentConfig::default().validate().is_ok());
        assert!(AgentConfig { gamma: 1.5, ..Default::default() }.validate().is_err());
        assert!(AgentConfig { n_steer: 4, ..Default::default() }.validate().is_err());
        assert!(AgentConfig { buffer_capacity: 10, ..Default::default() }.validate().is_err());
    }
}
