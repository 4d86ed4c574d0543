//! Ornstein–Uhlenbeck exploration noise.

use rand::Rng;
use rand_distr::StandardNormal;

/// Discrete OU process `x ← x + θ·(0 − x) + σ·N(0,1)` per component,
/// giving temporally correlated exploration noise for deterministic
/// policies. The stationary variance is `σ²/(2θ − θ²)`.
#[derive(Debug, Clone)]
pub struct OuNoise {
    state: Vec<f64>,
    pub theta: f64,
    pub sigma: f64,
    pub sigma_decay: f64,
}

impl OuNoise {
    pub fn new(dim: usize, theta: f64, sigma: f64, sigma_decay: f64) -> Self {
        OuNoise {
            state: vec![0.0; dim],
            theta,
            sigma,
            sigma_decay,
        }
    }

    /// Zero the process state (start of an episode).
    pub fn reset(&mut self) {
        self.state.fill(0.0);
    }

    /// Shrink σ by the per-episode decay factor.
    pub fn decay_sigma(&mut self) {
        self.sigma *= self.sigma_decay;
    }

    /// Advance the process one step and return the new state.
    pub fn step(&mut self, rng: &mut impl Rng) -> &[f64] {
        for x in &mut self.state {
            let gauss: f64 = rng.sample(StandardNormal);
            *x += self.theta * (0.0 - *x) + self.sigma * gauss;
        }
        &self.state
    }
}
