//! Seeded training runs.
//!
//! One run = one world, one agent, `episodes` episodes of
//! reset → act → step → store → update, one metrics CSV row per episode,
//! periodic checkpoints, and a final checkpoint. Every random draw comes
//! from a labeled stream of the run's master seed, so a (config, seed) pair
//! reproduces its outputs byte-for-byte.

use std::path::PathBuf;
use std::time::Instant;

use rand_chacha::ChaCha12Rng;

use crate::agents::{DdpgAgent, DqnAgent, Transition};
use crate::env::{discrete_action_table, NavEnv};
use crate::error::Result;
use crate::harness::checkpoint::Checkpoint;
use crate::harness::config::{Algo, RunConfig};
use crate::harness::metrics::{EpisodeRecord, MetricsWriter};
use crate::harness::seed::SeedTree;
use crate::vehicle::ControlAction;

/// Checkpoint cadence in episodes.
const CHECKPOINT_EVERY: usize = 50;

/// Outputs of a completed training run.
pub struct TrainArtifacts {
    pub records: Vec<EpisodeRecord>,
    pub metrics_path: PathBuf,
    pub checkpoint_path: PathBuf,
    /// Real elapsed training time (reported, never part of the metrics CSV).
    pub train_wall_s: f64,
}

enum Learner {
    Ddpg(DdpgAgent),
    Dqn { agent: DqnAgent, table: Vec<ControlAction>, n_steer: usize },
}

impl Learner {
    fn build(config: &RunConfig, obs_dim: usize, rng: &mut ChaCha12Rng) -> Result<Self> {
        match config.algo {
            Algo::Ddpg => Ok(Learner::Ddpg(DdpgAgent::new(obs_dim, &config.agent, rng)?)),
            Algo::Dqn | Algo::Ddqn => {
                let n_steer = config.agent.n_steer;
                let table = discrete_action_table(
                    n_steer,
                    config.env.vehicle.v_max,
                    &config.env.vehicle,
                )?;
                let agent = DqnAgent::new(
                    obs_dim,
                    table.len(),
                    config.algo == Algo::Ddqn,
                    &config.agent,
                    rng,
                )?;
                Ok(Learner::Dqn { agent, table, n_steer })
            }
        }
    }

    fn checkpoint(&self, config: &RunConfig) -> Checkpoint {
        match self {
            Learner::Ddpg(agent) => Checkpoint::Ddpg {
                env: config.env,
                agent: clone_ddpg(agent),
            },
            Learner::Dqn { agent, n_steer, .. } => Checkpoint::Dqn {
                env: config.env,
                agent: clone_dqn(agent),
                n_steer: *n_steer,
            },
        }
    }
}

// The agents own their replay buffers, which makes them expensive to clone
// verbatim; checkpointing only needs the learned state.
fn clone_ddpg(agent: &DdpgAgent) -> DdpgAgent {
    DdpgAgent {
        actor: agent.actor.clone(),
        actor_target: agent.actor_target.clone(),
        critic: agent.critic.clone(),
        critic_target: agent.critic_target.clone(),
        actor_adam: agent.actor_adam.clone(),
        critic_adam: agent.critic_adam.clone(),
        replay: crate::agents::ReplayBuffer::new(agent.replay.capacity()),
        noise: agent.noise.clone(),
        gamma: agent.gamma,
        tau: agent.tau,
        batch_size: agent.batch_size,
    }
}

fn clone_dqn(agent: &DqnAgent) -> DqnAgent {
    DqnAgent {
        q_net: agent.q_net.clone(),
        q_target: agent.q_target.clone(),
        adam: agent.adam.clone(),
        replay: crate::agents::ReplayBuffer::new(agent.replay.capacity()),
        epsilon: agent.epsilon,
        gamma: agent.gamma,
        batch_size: agent.batch_size,
        double_q: agent.double_q,
        target_sync: agent.target_sync,
        updates: agent.updates,
    }
}

/// Run a full training job per `config`. `progress` receives one line per
/// checkpoint interval; pass `false` for silent operation (tests, compare
/// sub-runs).
pub fn train(config: &RunConfig, progress: bool) -> Result<TrainArtifacts> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)?;
    let started = Instant::now();

    let seeds = SeedTree::new(config.seed);
    let map = config.world.build(seeds.child_seed("world"))?;
    let mut env = NavEnv::new(map, config.env)?;
    let mut goal_rng = seeds.stream("goals");
    let mut explore_rng = seeds.stream("explore");
    let mut replay_rng = seeds.stream("replay");
    let mut learner = Learner::build(config, env.obs_dim(), &mut seeds.stream("init"))?;

    let metrics_path = config.out_dir.join("metrics.csv");
    let mut metrics = MetricsWriter::create(&metrics_path)?;
    let mut records = Vec::with_capacity(config.episodes);

    for episode in 1..=config.episodes {
        if let Learner::Ddpg(agent) = &mut learner {
            agent.begin_episode();
        }
        let mut obs = env.reset(&mut goal_rng)?.to_vector();
        let mut cumulative_reward = 0.0;
        let mut steps = 0;
        let mut env_steps_since_update = 0;
        let outcome = loop {
            let result = match &mut learner {
                Learner::Ddpg(agent) => {
                    let (control, normalized) =
                        agent.select_action(&obs, true, &config.env.vehicle, &mut explore_rng)?;
                    let step = env.step(control)?;
                    let next = step.observation.to_vector();
                    agent.push_transition(Transition {
                        obs: std::mem::replace(&mut obs, next.clone()),
                        action: normalized,
                        reward: step.reward,
                        next_obs: next,
                        done: step.done,
                    });
                    env_steps_since_update += 1;
                    if env_steps_since_update >= config.agent.update_every {
                        env_steps_since_update = 0;
                        agent.update(&mut replay_rng)?;
                    }
                    step
                }
                Learner::Dqn { agent, table, .. } => {
                    let index = agent.select_action(&obs, true, &mut explore_rng)?;
                    let step = env.step(table[index])?;
                    let next = step.observation.to_vector();
                    agent.push_transition(Transition {
                        obs: std::mem::replace(&mut obs, next.clone()),
                        action: index,
                        reward: step.reward,
                        next_obs: next,
                        done: step.done,
                    });
                    env_steps_since_update += 1;
                    if env_steps_since_update >= config.agent.update_every {
                        env_steps_since_update = 0;
                        agent.update(&mut replay_rng)?;
                    }
                    step
                }
            };
            cumulative_reward += result.reward;
            steps += 1;
            if result.done {
                break result.outcome;
            }
        };
        if let Learner::Ddpg(agent) = &mut learner {
            agent.end_episode();
        }

        let record = EpisodeRecord {
            episode,
            steps,
            cumulative_reward,
            outcome,
            wall_ms: (steps as f64 * config.env.vehicle.dt * 1000.0).round() as u64,
        };
        metrics.append(&record)?;
        records.push(record);

        if episode % CHECKPOINT_EVERY == 0 {
            learner
                .checkpoint(config)
                .save(config.out_dir.join(format!("checkpoint-ep{episode:04}.ckpt")))?;
            if progress {
                let recent = &records[episode.saturating_sub(CHECKPOINT_EVERY)..];
                let successes = recent
                    .iter()
                    .filter(|r| r.outcome == crate::env::Outcome::ReachedGoal)
                    .count();
                let mean_reward: f64 =
                    recent.iter().map(|r| r.cumulative_reward).sum::<f64>() / recent.len() as f64;
                println!(
                    "[{}] episode {episode}/{}: last-{} success {successes}/{}, mean reward {mean_reward:.2}",
                    config.algo,
                    config.episodes,
                    recent.len(),
                    recent.len(),
                );
            }
        }
    }

    let checkpoint_path = config.out_dir.join("checkpoint-final.ckpt");
    learner.checkpoint(config).save(&checkpoint_path)?;
    metrics.finish()?;

    Ok(TrainArtifacts {
        records,
        metrics_path,
        checkpoint_path,
        train_wall_s: started.elapsed().as_secs_f64(),
    })
}
