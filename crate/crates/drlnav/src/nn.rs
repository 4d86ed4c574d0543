//! Dense feedforward networks with hand-derived reverse-mode gradients.
//!
//! Everything is `f64` and batch-major: a batch of `B` vectors of width `n`
//! is an `Array2<f64>` of shape `(B, n)`. Layer `l` computes
//! `a_l = σ(a_{l-1} · W_lᵀ + b_l)` with `W_l` of shape `(out, in)`.
//!
//! [`MlpNetwork::forward`] returns a [`ForwardCache`] that
//! [`MlpNetwork::backward`] consumes to produce exact gradients of
//! `Σ output ⊙ output_gradient` with respect to every parameter *and* the
//! input — the input gradient is what lets a critic's action-gradient flow
//! back into an actor. Optimization is Adam ([`adam_step`]) and target
//! networks track their online twins through [`soft_update`]:
//! `θ' ← τ·θ' + (1-τ)·θ`, τ being the fraction of the target that is kept.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Linear,
}

impl Activation {
    fn apply(self, z: &Array2<f64>) -> Array2<f64> {
        match self {
            Activation::Relu => z.mapv(|v| v.max(0.0)),
            Activation::Tanh => z.mapv(f64::tanh),
            Activation::Linear => z.clone(),
        }
    }

    /// σ'(z) given both the pre-activation and the activation value.
    fn derivative(self, z: &Array2<f64>, a: &Array2<f64>) -> Array2<f64> {
        match self {
            Activation::Relu => z.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 }),
            Activation::Tanh => a.mapv(|t| 1.0 - t * t),
            Activation::Linear => Array2::ones(z.dim()),
        }
    }
}

/// Fully connected network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork {
    pub layer_sizes: Vec<usize>,
    /// One `(out, in)` matrix per layer.
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
}

/// Intermediate values of one forward pass, consumed by `backward`.
pub struct ForwardCache {
    /// `activations[0]` is the input; `activations[l+1]` the output of layer `l`.
    activations: Vec<Array2<f64>>,
    pre_activations: Vec<Array2<f64>>,
}

/// Per-parameter gradients, shaped exactly like the network.
#[derive(Debug, Clone)]
pub struct ParamGrads {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl MlpNetwork {
    /// Glorot-uniform initialization: weights drawn from
    /// `±sqrt(6/(fan_in+fan_out))`, biases zero.
    pub fn init(
        layer_sizes: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::config(format!(
                "network needs at least 2 layers, got {:?}",
                layer_sizes
            )));
        }
        if layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::config("layer sizes must be >= 1"));
        }
        let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
        let mut biases = Vec::with_capacity(layer_sizes.len() - 1);
        for pair in layer_sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_fn((fan_out, fan_in), |_| rng.random_range(-bound..bound));
            weights.push(w);
            biases.push(Array1::zeros(fan_out));
        }
        Ok(MlpNetwork {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            hidden_activation,
            output_activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    fn n_layers(&self) -> usize {
        self.weights.len()
    }

    fn activation_for(&self, layer: usize) -> Activation {
        if layer + 1 == self.n_layers() {
            self.output_activation
        } else {
            self.hidden_activation
        }
    }

    /// Batch forward pass. Returns the output and the cache needed for
    /// `backward`.
    pub fn forward(&self, input: &Array2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        if input.ncols() != self.input_dim() {
            return Err(Error::shape(format!(
                "forward input width {} != layer size {}",
                input.ncols(),
                self.input_dim()
            )));
        }
        let mut activations = Vec::with_capacity(self.n_layers() + 1);
        let mut pre_activations = Vec::with_capacity(self.n_layers());
        activations.push(input.clone());
        for layer in 0..self.n_layers() {
            let z = activations[layer].dot(&self.weights[layer].t()) + &self.biases[layer];
            let a = self.activation_for(layer).apply(&z);
            pre_activations.push(z);
            activations.push(a);
        }
        let output = activations.last().unwrap().clone();
        Ok((output, ForwardCache { activations, pre_activations }))
    }

    /// Forward pass without keeping the cache.
    pub fn predict(&self, input: &Array2<f64>) -> Result<Array2<f64>> {
        Ok(self.forward(input)?.0)
    }

    /// Reverse-mode gradients of `Σ_{b,o} output[b,o] · output_gradient[b,o]`
    /// with respect to all parameters (summed over the batch) and the input.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_gradient: &Array2<f64>,
    ) -> Result<(ParamGrads, Array2<f64>)> {
        let n = self.n_layers();
        if cache.pre_activations.len() != n
            || cache.activations.first().map(|a| a.ncols()) != Some(self.input_dim())
        {
            return Err(Error::shape("forward cache does not match this network"));
        }
        let last = &cache.activations[n];
        if output_gradient.dim() != last.dim() {
            return Err(Error::shape(format!(
                "output gradient shape {:?} != output shape {:?}",
                output_gradient.dim(),
                last.dim()
            )));
        }
        let mut weight_grads = vec![Array2::zeros((0, 0)); n];
        let mut bias_grads = vec![Array1::zeros(0); n];
        let mut upstream = output_gradient.clone();
        for layer in (0..n).rev() {
            // δ = upstream ⊙ σ'(z)
            let delta = &upstream
                * &self
                    .activation_for(layer)
                    .derivative(&cache.pre_activations[layer], &cache.activations[layer + 1]);
            weight_grads[layer] = delta.t().dot(&cache.activations[layer]);
            bias_grads[layer] = delta.sum_axis(Axis(0));
            upstream = delta.dot(&self.weights[layer]);
        }
        Ok((ParamGrads { weights: weight_grads, biases: bias_grads }, upstream))
    }
}

/// Adam moment estimates, shaped like the network they optimize.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m_weights: Vec<Array2<f64>>,
    pub v_weights: Vec<Array2<f64>>,
    pub m_biases: Vec<Array1<f64>>,
    pub v_biases: Vec<Array1<f64>>,
    pub step_count: u64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_stab: f64,
}

impl AdamState {
    pub fn new(net: &MlpNetwork, alpha: f64) -> Self {
        AdamState {
            m_weights: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_weights: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_biases: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            v_biases: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            step_count: 0,
            alpha,
            beta1: 0.9,
            beta2: 0.999,
            eps_stab: 1e-8,
        }
    }
}

/// One Adam update with bias correction. Increments `step_count` by one.
pub fn adam_step(net: &mut MlpNetwork, grads: &ParamGrads, adam: &mut AdamState) -> Result<()> {
    if grads.weights.len() != net.weights.len()
        || grads
            .weights
            .iter()
            .zip(&net.weights)
            .any(|(g, w)| g.dim() != w.dim())
        || grads
            .biases
            .iter()
            .zip(&net.biases)
            .any(|(g, b)| g.len() != b.len())
    {
        return Err(Error::shape("gradient shapes do not match network parameters"));
    }
    adam.step_count += 1;
    let t = adam.step_count as i32;
    let bias1 = 1.0 - adam.beta1.powi(t);
    let bias2 = 1.0 - adam.beta2.powi(t);
    let (b1, b2, alpha, eps) = (adam.beta1, adam.beta2, adam.alpha, adam.eps_stab);

    for layer in 0..net.weights.len() {
        let g = &grads.weights[layer];
        let m = &mut adam.m_weights[layer];
        let v = &mut adam.v_weights[layer];
        m.zip_mut_with(g, |m, &g| *m = b1 * *m + (1.0 - b1) * g);
        v.zip_mut_with(g, |v, &g| *v = b2 * *v + (1.0 - b2) * g * g);
        ndarray::Zip::from(&mut net.weights[layer])
            .and(&*m)
            .and(&*v)
            .for_each(|w, &m, &v| *w -= alpha * (m / bias1) / ((v / bias2).sqrt() + eps));

        let g = &grads.biases[layer];
        let m = &mut adam.m_biases[layer];
        let v = &mut adam.v_biases[layer];
        m.zip_mut_with(g, |m, &g| *m = b1 * *m + (1.0 - b1) * g);
        v.zip_mut_with(g, |v, &g| *v = b2 * *v + (1.0 - b2) * g * g);
        ndarray::Zip::from(&mut net.biases[layer])
            .and(&*m)
            .and(&*v)
            .for_each(|b, &m, &v| *b -= alpha * (m / bias1) / ((v / bias2).sqrt() + eps));
    }
    Ok(())
}

/// Soft target update `θ' ← τ·θ' + (1-τ)·θ`: τ = 1 leaves the target
/// untouched, τ = 0 copies the online network.
pub fn soft_update(target: &mut MlpNetwork, online: &MlpNetwork, tau: f64) -> Result<()> {
    if target.layer_sizes != online.layer_sizes {
        return Err(Error::shape(format!(
            "target architecture {:?} != online architecture {:?}",
            target.layer_sizes, online.layer_sizes
        )));
    }
    for (t, o) in target.weights.iter_mut().zip(&online.weights) {
        t.zip_mut_with(o, |t, &o| *t = tau * *t + (1.0 - tau) * o);
    }
    for (t, o) in target.biases.iter_mut().zip(&online.biases) {
        t.zip_mut_with(o, |t, &o| *t = tau * *t + (1.0 - tau) * o);
    }
    Ok(())
}
