//! Binary agent checkpoints.
//!
//! Layout: magic `ADRLCKPT`, format version (u32 LE), an algorithm tag, the
//! payload (environment config, hyperparameters, network parameter and Adam
//! moment arrays as little-endian f64 bits in declaration order), and a
//! trailing CRC-32 of the payload. Replay buffer contents are deliberately
//! not serialized; everything else round-trips bit-for-bit, so
//! save → load → save reproduces the file byte-identically.

use std::path::Path;

use crate::agents::{DdpgAgent, DqnAgent, OuNoise, ReplayBuffer, TargetSync};
use crate::env::{EnvConfig, RewardCoeffs, SensorConfig};
use crate::error::{Error, Result};
use crate::harness::config::Algo;
use crate::nn::{Activation, AdamState, MlpNetwork};
use crate::vehicle::VehicleParams;

const MAGIC: &[u8; 8] = b"ADRLCKPT";
const VERSION: u32 = 1;

/// A trained agent plus the environment configuration it was trained with,
/// which makes a checkpoint self-contained for evaluation.
#[derive(Debug)]
pub enum Checkpoint {
    Ddpg { env: EnvConfig, agent: DdpgAgent },
    Dqn { env: EnvConfig, agent: DqnAgent, n_steer: usize },
}

impl Checkpoint {
    pub fn algo(&self) -> Algo {
        match self {
            Checkpoint::Ddpg { .. } => Algo::Ddpg,
            Checkpoint::Dqn { agent, .. } => {
                if agent.double_q {
                    Algo::Ddqn
                } else {
                    Algo::Dqn
                }
            }
        }
    }

    pub fn env(&self) -> &EnvConfig {
        match self {
            Checkpoint::Ddpg { env, .. } | Checkpoint::Dqn { env, .. } => env,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut payload = Vec::new();
        payload.push(match self.algo() {
            Algo::Ddpg => 0u8,
            Algo::Dqn => 1,
            Algo::Ddqn => 2,
        });
        write_env(&mut payload, self.env());
        match self {
            Checkpoint::Ddpg { agent, .. } => write_ddpg(&mut payload, agent),
            Checkpoint::Dqn { agent, n_steer, .. } => write_dqn(&mut payload, agent, *n_steer),
        }

        let mut bytes = Vec::with_capacity(payload.len() + 16);
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&VERSION.to_le_bytes());
        bytes.extend_from_slice(&payload);
        bytes.extend_from_slice(&crc32(&payload).to_le_bytes());
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint> {
        let bytes = std::fs::read(path.as_ref())?;
        let mut r = Reader::new(&bytes);

        r.section("magic");
        if r.take(8)? != MAGIC {
            return Err(r.error("bad magic, not a checkpoint file"));
        }
        r.section("version");
        let version = r.u32()?;
        if version != VERSION {
            return Err(r.error(format!("unsupported version {version}, expected {VERSION}")));
        }

        let payload_start = r.pos;
        r.section("algo");
        let algo_tag = r.u8()?;
        let env = read_env(&mut r)?;
        let checkpoint = match algo_tag {
            0 => Checkpoint::Ddpg { env, agent: read_ddpg(&mut r)? },
            1 | 2 => {
                let (agent, n_steer) = read_dqn(&mut r, algo_tag == 2)?;
                Checkpoint::Dqn { env, agent, n_steer }
            }
            other => return Err(r.error(format!("unknown algo tag {other}"))),
        };

        r.section("checksum");
        let payload_end = r.pos;
        let stored = r.u32()?;
        if r.pos != bytes.len() {
            return Err(r.error("trailing bytes after checksum"));
        }
        let computed = crc32(&bytes[payload_start..payload_end]);
        if stored != computed {
            return Err(r.error(format!(
                "payload checksum mismatch (stored {stored:#010x}, computed {computed:#010x})"
            )));
        }
        Ok(checkpoint)
    }

    /// Load and verify the stored algorithm matches the requested one.
    pub fn load_expecting(path: impl AsRef<Path>, algo: Algo) -> Result<Checkpoint> {
        let checkpoint = Checkpoint::load(path)?;
        if checkpoint.algo() != algo {
            return Err(Error::config(format!(
                "checkpoint holds a {} agent but {algo} was requested",
                checkpoint.algo()
            )));
        }
        Ok(checkpoint)
    }
}

// ── payload encoding ────────────────────────────────────────────────────

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_bits().to_le_bytes());
}

fn write_env(out: &mut Vec<u8>, env: &EnvConfig) {
    for v in [
        env.vehicle.wheelbase,
        env.vehicle.v_max,
        env.vehicle.delta_max,
        env.vehicle.footprint_radius,
        env.vehicle.dt,
    ] {
        put_f64(out, v);
    }
    put_u32(out, env.sensor.n_beams as u32);
    put_f64(out, env.sensor.fov);
    put_f64(out, env.sensor.max_range);
    for v in [
        env.reward.r_goal,
        env.reward.r_crash,
        env.reward.k_progress,
        env.reward.step_cost,
    ] {
        put_f64(out, v);
    }
    put_u32(out, env.max_steps as u32);
    put_f64(out, env.goal_radius);
}

fn activation_tag(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::Tanh => 1,
        Activation::Linear => 2,
    }
}

fn write_net(out: &mut Vec<u8>, net: &MlpNetwork) {
    put_u32(out, net.layer_sizes.len() as u32);
    for &s in &net.layer_sizes {
        put_u32(out, s as u32);
    }
    out.push(activation_tag(net.hidden_activation));
    out.push(activation_tag(net.output_activation));
    for (w, b) in net.weights.iter().zip(&net.biases) {
        for &v in w.iter() {
            put_f64(out, v);
        }
        for &v in b.iter() {
            put_f64(out, v);
        }
    }
}

fn write_adam(out: &mut Vec<u8>, adam: &AdamState) {
    for v in [adam.alpha, adam.beta1, adam.beta2, adam.eps_stab] {
        put_f64(out, v);
    }
    put_u64(out, adam.step_count);
    for layer in 0..adam.m_weights.len() {
        for arr in [&adam.m_weights[layer], &adam.v_weights[layer]] {
            for &v in arr.iter() {
                put_f64(out, v);
            }
        }
        for arr in [&adam.m_biases[layer], &adam.v_biases[layer]] {
            for &v in arr.iter() {
                put_f64(out, v);
            }
        }
    }
}

fn write_ddpg(out: &mut Vec<u8>, agent: &DdpgAgent) {
    put_f64(out, agent.gamma);
    put_f64(out, agent.tau);
    put_u32(out, agent.batch_size as u32);
    put_u32(out, agent.replay.capacity() as u32);
    put_f64(out, agent.noise.theta);
    put_f64(out, agent.noise.sigma);
    put_f64(out, agent.noise.sigma_decay);
    for net in [&agent.actor, &agent.actor_target, &agent.critic, &agent.critic_target] {
        write_net(out, net);
    }
    write_adam(out, &agent.actor_adam);
    write_adam(out, &agent.critic_adam);
}

fn write_dqn(out: &mut Vec<u8>, agent: &DqnAgent, n_steer: usize) {
    put_f64(out, agent.gamma);
    put_f64(out, agent.epsilon);
    put_u32(out, agent.batch_size as u32);
    put_u32(out, agent.replay.capacity() as u32);
    put_u32(out, n_steer as u32);
    match agent.target_sync {
        TargetSync::Soft { tau } => {
            out.push(0);
            put_f64(out, tau);
        }
        TargetSync::Hard { every } => {
            out.push(1);
            put_u64(out, every);
        }
    }
    put_u64(out, agent.updates);
    write_net(out, &agent.q_net);
    write_net(out, &agent.q_target);
    write_adam(out, &agent.adam);
}

// ── payload decoding ────────────────────────────────────────────────────

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    current_section: &'static str,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0, current_section: "header" }
    }

    fn section(&mut self, name: &'static str) {
        self.current_section = name;
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Format {
            section: self.current_section,
            offset: self.pos as u64,
            message: message.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(self.error(format!(
                "file truncated: needed {n} bytes, {} remain",
                self.buf.len() - self.pos
            )));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
}

fn read_env(r: &mut Reader) -> Result<EnvConfig> {
    r.section("env");
    Ok(EnvConfig {
        vehicle: VehicleParams {
            wheelbase: r.f64()?,
            v_max: r.f64()?,
            delta_max: r.f64()?,
            footprint_radius: r.f64()?,
            dt: r.f64()?,
        },
        sensor: SensorConfig {
            n_beams: r.u32()? as usize,
            fov: r.f64()?,
            max_range: r.f64()?,
        },
        reward: RewardCoeffs {
            r_goal: r.f64()?,
            r_crash: r.f64()?,
            k_progress: r.f64()?,
            step_cost: r.f64()?,
        },
        max_steps: r.u32()? as usize,
        goal_radius: r.f64()?,
    })
}

fn read_activation(r: &mut Reader) -> Result<Activation> {
    match r.u8()? {
        0 => Ok(Activation::Relu),
        1 => Ok(Activation::Tanh),
        2 => Ok(Activation::Linear),
        other => Err(r.error(format!("unknown activation tag {other}"))),
    }
}

fn read_net(r: &mut Reader, section: &'static str) -> Result<MlpNetwork> {
    r.section(section);
    let n_sizes = r.u32()? as usize;
    if !(2..=64).contains(&n_sizes) {
        return Err(r.error(format!("implausible layer count {n_sizes}")));
    }
    let mut layer_sizes = Vec::with_capacity(n_sizes);
    for _ in 0..n_sizes {
        let s = r.u32()? as usize;
        if s == 0 {
            return Err(r.error("zero layer size"));
        }
        layer_sizes.push(s);
    }
    let hidden_activation = read_activation(r)?;
    let output_activation = read_activation(r)?;
    let mut weights = Vec::with_capacity(n_sizes - 1);
    let mut biases = Vec::with_capacity(n_sizes - 1);
    for pair in layer_sizes.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let mut w = ndarray::Array2::zeros((fan_out, fan_in));
        for v in w.iter_mut() {
            *v = r.f64()?;
        }
        let mut b = ndarray::Array1::zeros(fan_out);
        for v in b.iter_mut() {
            *v = r.f64()?;
        }
        weights.push(w);
        biases.push(b);
    }
    Ok(MlpNetwork {
        layer_sizes,
        weights,
        biases,
        hidden_activation,
        output_activation,
    })
}

fn read_adam(r: &mut Reader, section: &'static str, net: &MlpNetwork) -> Result<AdamState> {
    r.section(section);
    let alpha = r.f64()?;
    let beta1 = r.f64()?;
    let beta2 = r.f64()?;
    let eps_stab = r.f64()?;
    let step_count = r.u64()?;
    let mut adam = AdamState::new(net, alpha);
    adam.beta1 = beta1;
    adam.beta2 = beta2;
    adam.eps_stab = eps_stab;
    adam.step_count = step_count;
    for layer in 0..net.weights.len() {
        for target in ["m", "v"] {
            let arr = if target == "m" {
                &mut adam.m_weights[layer]
            } else {
                &mut adam.v_weights[layer]
            };
            for v in arr.iter_mut() {
                *v = r.f64()?;
            }
        }
        for target in ["m", "v"] {
            let arr = if target == "m" {
                &mut adam.m_biases[layer]
            } else {
                &mut adam.v_biases[layer]
            };
            for v in arr.iter_mut() {
                *v = r.f64()?;
            }
        }
    }
    Ok(adam)
}

fn read_ddpg(r: &mut Reader) -> Result<DdpgAgent> {
    r.section("ddpg-hyper");
    let gamma = r.f64()?;
    let tau = r.f64()?;
    let batch_size = r.u32()? as usize;
    let buffer_capacity = r.u32()? as usize;
    let theta = r.f64()?;
    let sigma = r.f64()?;
    let sigma_decay = r.f64()?;
    let actor = read_net(r, "actor")?;
    let actor_target = read_net(r, "actor_target")?;
    let critic = read_net(r, "critic")?;
    let critic_target = read_net(r, "critic_target")?;
    if actor.layer_sizes != actor_target.layer_sizes
        || critic.layer_sizes != critic_target.layer_sizes
    {
        return Err(r.error("target/online architecture mismatch"));
    }
    let actor_adam = read_adam(r, "actor_adam", &actor)?;
    let critic_adam = read_adam(r, "critic_adam", &critic)?;
    Ok(DdpgAgent {
        actor,
        actor_target,
        critic,
        critic_target,
        actor_adam,
        critic_adam,
        replay: ReplayBuffer::new(buffer_capacity.max(1)),
        noise: OuNoise::new(2, theta, sigma, sigma_decay),
        gamma,
        tau,
        batch_size,
    })
}

fn read_dqn(r: &mut Reader, double_q: bool) -> Result<(DqnAgent, usize)> {
    r.section("dqn-hyper");
    let gamma = r.f64()?;
    let epsilon = r.f64()?;
    let batch_size = r.u32()? as usize;
    let buffer_capacity = r.u32()? as usize;
    let n_steer = r.u32()? as usize;
    let target_sync = match r.u8()? {
        0 => TargetSync::Soft { tau: r.f64()? },
        1 => TargetSync::Hard { every: r.u64()? },
        other => return Err(r.error(format!("unknown target sync tag {other}"))),
    };
    let updates = r.u64()?;
    let q_net = read_net(r, "q_net")?;
    let q_target = read_net(r, "q_target")?;
    if q_net.layer_sizes != q_target.layer_sizes {
        return Err(r.error("q_net/q_target architecture mismatch"));
    }
    let adam = read_adam(r, "adam", &q_net)?;
    Ok((
        DqnAgent {
            q_net,
            q_target,
            adam,
            replay: ReplayBuffer::new(buffer_capacity.max(1)),
            epsilon,
            gamma,
            batch_size,
            double_q,
            target_sync,
            updates,
        },
        n_steer,
    ))
}

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
fn crc32(data: &[u8]) -> u32 {
    let mut crc = !0u32;
    for &byte in data {
        crc ^= byte as u32;
        for _ in 0..8 {
            let mask = (crc & 1).wrapping_neg();
            crc = (crc >> 1) ^ (0xEDB8_8320 & mask);
        }
    }
    !crc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::AgentConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sample_ddpg() -> Checkpoint {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let config = AgentConfig { hidden: vec![8, 8], ..AgentConfig::default() };
        let mut agent = DdpgAgent::new(6, &config, &mut rng).unwrap();
        agent.noise.sigma = 0.123; // decayed mid-training value
        agent.actor_adam.step_count = 77;
        Checkpoint::Ddpg { env: EnvConfig::default(), agent }
    }

    fn sample_dqn(double_q: bool) -> Checkpoint {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let config = AgentConfig { hidden: vec![8], ..AgentConfig::default() };
        let agent = DqnAgent::new(6, 5, double_q, &config, &mut rng).unwrap();
        Checkpoint::Dqn { env: EnvConfig::default(), agent, n_steer: 5 }
    }

    #[test]
    fn crc32_known_vector() {
        // standard test vector: crc32("123456789") = 0xCBF43926
        assert_eq!(crc32(b"123456789"), 0xCBF4_3926);
    }

    #[test]
    fn ddpg_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ckpt");
        let p2 = dir.path().join("b.ckpt");
        let ckpt = sample_ddpg();
        ckpt.save(&p1).unwrap();
        let loaded = Checkpoint::load(&p1).unwrap();
        loaded.save(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        match (ckpt, loaded) {
            (Checkpoint::Ddpg { agent: a, .. }, Checkpoint::Ddpg { agent: b, .. }) => {
                assert_eq!(a.actor, b.actor);
                assert_eq!(a.critic_target, b.critic_target);
                assert_eq!(a.actor_adam, b.actor_adam);
                assert_eq!(a.noise.sigma, b.noise.sigma);
                assert_eq!(a.replay.capacity(), b.replay.capacity());
            }
            _ => panic!("algo changed in round trip"),
        }
    }

    #[test]
    fn dqn_and_ddqn_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (double_q, algo) in [(false, Algo::Dqn), (true, Algo::Ddqn)] {
            let path = dir.path().join(format!("{algo}.ckpt"));
            let ckpt = sample_dqn(double_q);
            assert_eq!(ckpt.algo(), algo);
            ckpt.save(&path).unwrap();
            let loaded = Checkpoint::load(&path).unwrap();
            assert_eq!(loaded.algo(), algo);
            let p2 = dir.path().join(format!("{algo}-2.ckpt"));
            loaded.save(&p2).unwrap();
            assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&p2).unwrap());
        }
    }

    #[test]
    fn truncated_file_names_the_section() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.ckpt");
        sample_ddpg().save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        // cut inside the critic parameter block
        let cut = bytes.len() * 3 / 5;
        std::fs::write(&path, &bytes[..cut]).unwrap();
        match Checkpoint::load(&path).unwrap_err() {
            Error::Format { section, .. } => {
                assert!(!section.is_empty() && section != "checksum", "section {section}");
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn corrupted_payload_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ckpt");
        sample_ddpg().save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40; // flip an exponent bit in some parameter
        std::fs::write(&path, bytes).unwrap();
        match Checkpoint::load(&path).unwrap_err() {
            Error::Format { section, message, .. } => {
                assert_eq!(section, "checksum", "{message}");
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        std::fs::write(&path, b"NOTACKPT0000000000000000").unwrap();
        match Checkpoint::load(&path).unwrap_err() {
            Error::Format { section: "magic", .. } => {}
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn algo_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("alg.ckpt");
        sample_ddpg().save(&path).unwrap();
        assert!(Checkpoint::load_expecting(&path, Algo::Ddpg).is_ok());
        match Checkpoint::load_expecting(&path, Algo::Dqn).unwrap_err() {
            Error::Config(msg) => assert!(msg.contains("ddpg") && msg.contains("dqn")),
            other => panic!("wrong error {other:?}"),
        }
    }
}
