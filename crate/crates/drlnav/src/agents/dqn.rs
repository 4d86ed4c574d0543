//! DQN and Double DQN over a discrete steering table.
//!
//! A single Q network `[obs, hidden.., n_actions]` with a target copy.
//! The two variants differ only in the bootstrap: DQN takes
//! `max_a Q_target(s', a)`, DDQN evaluates `Q_target` at the action the
//! *online* network prefers, which removes most of the max-operator's
//! overestimation bias.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::{adam_step, soft_update, Activation, AdamState, MlpNetwork};

use super::{AgentConfig, ReplayBuffer, Transition};

/// How the target network follows the online network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSync {
    /// Blend by τ after every update (τ = retention of the target).
    Soft { tau: f64 },
    /// Copy the online network every `every` gradient steps.
    Hard { every: u64 },
}

/// ε-greedy selection: with probability `1-ε` the argmax (lowest index wins
/// ties), otherwise a uniformly random index. Deterministic per RNG state.
pub fn epsilon_greedy(q_values: &[f64], epsilon: f64, rng: &mut impl Rng) -> Result<usize> {
    if q_values.is_empty() {
        return Err(Error::config("epsilon_greedy needs at least one Q value"));
    }
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return Ok(rng.random_range(0..q_values.len()));
    }
    Ok(argmax(q_values))
}

/// Index of the maximum value, lowest index breaking ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// TD regression targets for a batch.
///
/// `q_next_target` holds `Q_target(s', ·)` rows. With
/// `q_next_online = None` this is the DQN rule
/// `yᵢ = rᵢ + γ·(1-doneᵢ)·max_a Q_target(s'ᵢ, a)`; passing the online
/// network's rows switches to the DDQN rule, which reads `Q_target` at
/// `argmax_a Q_online(s'ᵢ, a)`.
pub fn td_targets(
    rewards: &Array1<f64>,
    dones: &[bool],
    gamma: f64,
    q_next_target: &Array2<f64>,
    q_next_online: Option<&Array2<f64>>,
) -> Array1<f64> {
    Array1::from_shape_fn(rewards.len(), |i| {
        if dones[i] {
            return rewards[i];
        }
        let target_row: Vec<f64> = q_next_target.row(i).to_vec();
        let bootstrap = match q_next_online {
            None => target_row[argmax(&target_row)],
            Some(online) => {
                let online_row: Vec<f64> = online.row(i).to_vec();
                target_row[argmax(&online_row)]
            }
        };
        rewards[i] + gamma * bootstrap
    })
}

#[derive(Debug)]
pub struct DqnAgent {
    pub q_net: MlpNetwork,
    pub q_target: MlpNetwork,
    pub adam: AdamState,
    pub replay: ReplayBuffer<usize>,
    pub epsilon: f64,
    pub gamma: f64,
    pub batch_size: usize,
    /// false = DQN target rule, true = DDQN.
    pub double_q: bool,
    pub target_sync: TargetSync,
    pub updates: u64,
}

impl DqnAgent {
    pub fn new(
        obs_dim: usize,
        n_actions: usize,
        double_q: bool,
        config: &AgentConfig,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        config.validate()?;
        if n_actions < 2 {
            return Err(Error::config("DQN needs at least 2 discrete actions"));
        }
        let mut sizes = vec![obs_dim];
        sizes.extend_from_slice(&config.hidden);
        sizes.push(n_actions);
        let q_net = MlpNetwork::init(&sizes, Activation::Relu, Activation::Linear, rng)?;
        let adam = AdamState::new(&q_net, config.alpha);
        Ok(DqnAgent {
            q_target: q_net.clone(),
            q_net,
            adam,
            replay: ReplayBuffer::new(config.buffer_capacity),
            epsilon: config.epsilon,
            gamma: config.gamma,
            batch_size: config.batch_size,
            double_q,
            target_sync: match config.hard_sync_every {
                Some(every) => TargetSync::Hard { every },
                None => TargetSync::Soft { tau: config.tau },
            },
            updates: 0,
        })
    }

    pub fn obs_dim(&self) -> usize {
        self.q_net.input_dim()
    }

    pub fn n_actions(&self) -> usize {
        self.q_net.output_dim()
    }

    /// Action index for `obs`: ε-greedy while exploring, pure argmax when
    /// not (no RNG consumed in greedy mode).
    pub fn select_action(&self, obs: &[f64], explore: bool, rng: &mut impl Rng) -> Result<usize> {
        let input = Array2::from_shape_vec((1, obs.len()), obs.to_vec())
            .map_err(|e| Error::shape(e.to_string()))?;
        let q = self.q_net.predict(&input)?;
        let row: Vec<f64> = q.row(0).to_vec();
        if explore {
            epsilon_greedy(&row, self.epsilon, rng)
        } else {
            Ok(argmax(&row))
        }
    }

    pub fn push_transition(&mut self, t: Transition<usize>) {
        self.replay.push(t);
    }

    /// One TD regression step on a sampled batch; `None` while the buffer is
    /// underfull. Returns the pre-update loss.
    pub fn update(&mut self, rng: &mut impl Rng) -> Result<Option<f64>> {
        let Some(batch) = self.replay.sample(self.batch_size, rng) else {
            return Ok(None);
        };
        let n = batch.len();
        let obs_dim = self.obs_dim();
        let mut obs = Array2::zeros((n, obs_dim));
        let mut next_obs = Array2::zeros((n, obs_dim));
        let mut rewards = Array1::zeros(n);
        let mut dones = vec![false; n];
        let mut action_idx = vec![0usize; n];
        for (i, t) in batch.into_iter().enumerate() {
            obs.row_mut(i).assign(&Array1::from_vec(t.obs.clone()));
            next_obs.row_mut(i).assign(&Array1::from_vec(t.next_obs.clone()));
            rewards[i] = t.reward;
            dones[i] = t.done;
            action_idx[i] = t.action;
        }

        let q_next_target = self.q_target.predict(&next_obs)?;
        let targets = if self.double_q {
            let q_next_online = self.q_net.predict(&next_obs)?;
            td_targets(&rewards, &dones, self.gamma, &q_next_target, Some(&q_next_online))
        } else {
            td_targets(&rewards, &dones, self.gamma, &q_next_target, None)
        };

        let (q_all, cache) = self.q_net.forward(&obs)?;
        let mut grad = Array2::zeros(q_all.dim());
        let mut loss = 0.0;
        for i in 0..n {
            let err = q_all[[i, action_idx[i]]] - targets[i];
            loss += err * err;
            grad[[i, action_idx[i]]] = 2.0 * err / n as f64;
        }
        loss /= n as f64;
        let (grads, _) = self.q_net.backward(&cache, &grad)?;
        adam_step(&mut self.q_net, &grads, &mut self.adam)?;

        self.updates += 1;
        match self.target_sync {
            TargetSync::Soft { tau } => soft_update(&mut self.q_target, &self.q_net, tau)?,
            TargetSync::Hard { every } => {
                if every > 0 && self.updates % every == 0 {
                    self.q_target = self.q_net.clone();
                }
            }
        }
        Ok(Some(loss))
    }
}
