//! Run configuration: TOML files with strict (unknown-key-rejecting) schema.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::agents::AgentConfig;
use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::world::{generate_world, WorldMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Ddpg,
    Dqn,
    Ddqn,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Ddpg => "ddpg",
            Algo::Dqn => "dqn",
            Algo::Ddqn => "ddqn",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ddpg" => Ok(Algo::Ddpg),
            "dqn" => Ok(Algo::Dqn),
            "ddqn" => Ok(Algo::Ddqn),
            other => Err(Error::config(format!(
                "algo must be one of ddpg|dqn|ddqn, got `{other}`"
            ))),
        }
    }
}

/// Where the training world comes from: procedural generation (dimensions
/// and obstacle counts) or an explicit world file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldSpec {
    pub width: f64,
    pub height: f64,
    pub rects: usize,
    pub circles: usize,
    /// When set, load this world file instead of generating.
    pub file: Option<PathBuf>,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            width: 20.0,
            height: 20.0,
            rects: 3,
            circles: 5,
            file: None,
        }
    }
}

impl WorldSpec {
    /// Materialize the map; `gen_seed` drives the procedural path.
    pub fn build(&self, gen_seed: u64) -> Result<WorldMap> {
        match &self.file {
            Some(path) => WorldMap::load(path),
            None => generate_world(self.width, self.height, self.rects, self.circles, gen_seed),
        }
    }
}

/// Everything one training run needs. All fields have desk-scale defaults;
/// a config file may override any subset, and CLI flags override the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algo: Algo,
    pub episodes: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Greedy evaluation episodes (eval / compare).
    pub eval_episodes: usize,
    /// Algorithms a `compare` run covers.
    pub algos: Vec<Algo>,
    pub world: WorldSpec,
    pub env: EnvConfig,
    pub agent: AgentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algo: Algo::Ddpg,
            episodes: 400,
            seed: 0,
            out_dir: PathBuf::from("out"),
            eval_episodes: 100,
            algos: vec![Algo::Ddpg, Algo::Ddqn, Algo::Dqn],
            world: WorldSpec::default(),
            env: EnvConfig::default(),
            agent: AgentConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| {
            Error::config(format!("{}: {}", path.as_ref().display(), e.message()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes < 1 {
            return Err(Error::config("episodes must be >= 1"));
        }
        if self.eval_episodes < 1 {
            return Err(Error::config("eval_episodes must be >= 1"));
        }
        if self.algos.is_empty() {
            return Err(Error::config("algos must not be empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for algo in &self.algos {
            if !seen.insert(algo) {
                return Err(Error::config(format!("duplicate algo entry `{algo}`")));
            }
        }
        if self.world.file.is_none() && !(self.world.width > 0.0 && self.world.height > 0.0) {
            return Err(Error::config("world.width and world.height must be > 0"));
        }
        self.env.validate()?;
        self.agent.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_episodes_rejected() {
        let config = RunConfig { episodes: 0, ..RunConfig::default() };
        assert!(matches!(config.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_algos_rejected() {
        let config = RunConfig {
            algos: vec![Algo::Ddpg, Algo::Ddpg],
            ..RunConfig::default()
        };
        assert!(matches!(config.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_are_named_in_the_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "episodes = 10\n\n[agent]\ngama = 0.9\n").unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gama"), "error should name the bad key: {msg}");
    }

    #[test]
    fn partial_file_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(
            &path,
            "algo = \"dqn\"\nepisodes = 25\n\n[world]\nwidth = 15.0\nheight = 15.0\n",
        )
        .unwrap();
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(config.algo, Algo::Dqn);
        assert_eq!(config.episodes, 25);
        assert_eq!(config.world.width, 15.0);
        assert_eq!(config.world.rects, 3); // default preserved
        assert_eq!(config.agent.gamma, 0.9);
    }

    #[test]
    fn round_trips_through_toml() {
        let config = RunConfig::default();
        let text = toml::to_string(&config).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, back);
    }
}
