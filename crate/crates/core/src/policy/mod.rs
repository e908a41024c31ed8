//! Stochastic Gaussian policies and their entropy-regularised optimizer.

mod eval;
mod ppo;

use std::path::Path;

use crate::approx::{Checkpoint, Mlp, MlpConfig};
use crate::env::{Actor, EnvSpec};
use crate::error::{Error, Result};
use crate::rng::{self, Rng64};

pub use eval::{evaluate, EvalResult};
pub use ppo::{compute_gae, MaxEntLearner, PolicyOptConfig, UpdateStats};

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// A sampled action together with its pre-squash draw and log-density.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSample {
    /// Squashed into the action bounds.
    pub action: Vec<f64>,
    /// Gaussian draw before squashing.
    pub raw: Vec<f64>,
    /// Log-density of `action`.
    pub log_prob: f64,
}

/// Squashed Gaussian policy: `u ~ N(mean_net(s), diag(exp(log_std))²)`,
/// `a = c + h·tanh(u)` with `c`, `h` the centre and half-width of the action
/// box. Every action it emits lies strictly inside the bounds, so its
/// log-density is finite wherever it is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPolicy {
    pub mean_net: Mlp,
    log_std: Vec<f64>,
    low: Vec<f64>,
    high: Vec<f64>,
}

/// Keeps `atanh` finite for actions recorded on the boundary.
const SQUASH_EDGE: f64 = 1.0 - 1e-9;

impl GaussianPolicy {
    /// The mean head starts near zero so the initial policy is centred.
    pub fn new(spec: &EnvSpec, arch: &MlpConfig, init_log_std: f64, seed: u64) -> Self {
        let mut mean_net = arch.build(spec.state_dim, spec.action_dim, seed);
        mean_net.scale_output_layer(0.01);
        Self {
            mean_net,
            log_std: vec![init_log_std.clamp(LOG_STD_MIN, LOG_STD_MAX); spec.action_dim],
            low: spec.action_low.clone(),
            high: spec.action_high.clone(),
        }
    }

    pub fn action_dim(&self) -> usize {
        self.log_std.len()
    }

    pub fn state_dim(&self) -> usize {
        self.mean_net.input_dim()
    }

    pub fn log_std(&self) -> &[f64] {
        &self.log_std
    }

    /// Sets the log standard deviation, clamped to `[LOG_STD_MIN, LOG_STD_MAX]`.
    pub fn set_log_std(&mut self, values: &[f64]) {
        for (d, v) in self.log_std.iter_mut().zip(values) {
            *d = v.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }

    pub(crate) fn log_std_mut(&mut self) -> &mut Vec<f64> {
        &mut self.log_std
    }

    pub(crate) fn clamp_log_std(&mut self) {
        for v in &mut self.log_std {
            *v = v.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }

    /// Mean of the pre-squash Gaussian.
    pub fn mean(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.mean_net.forward(state)
    }

    fn half_width(&self, i: usize) -> f64 {
        0.5 * (self.high[i] - self.low[i])
    }

    /// `c + h·tanh(u)`.
    pub fn squash(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, v)| 0.5 * (self.high[i] + self.low[i]) + self.half_width(i) * v.tanh())
            .collect()
    }

    /// Inverse of [`Self::squash`]; actions on or beyond the boundary map to
    /// a large finite pre-image.
    pub fn unsquash(&self, action: &[f64]) -> Vec<f64> {
        action
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let y = (a - 0.5 * (self.high[i] + self.low[i])) / self.half_width(i);
                y.clamp(-SQUASH_EDGE, SQUASH_EDGE).atanh()
            })
            .collect()
    }

    /// `Σ log(h·(1 - tanh²u))`, the log-Jacobian of the squash at `u`.
    fn log_jacobian(&self, u: &[f64]) -> f64 {
        u.iter()
            .enumerate()
            .map(|(i, v)| {
                let t = v.tanh().clamp(-SQUASH_EDGE, SQUASH_EDGE);
                (self.half_width(i) * (1.0 - t * t)).ln()
            })
            .sum()
    }

    pub fn sample_action(&self, state: &[f64], rng: &mut Rng64) -> Result<ActionSample> {
        let mean = self.mean(state)?;
        let raw: Vec<f64> = mean
            .iter()
            .zip(&self.log_std)
            .map(|(m, ls)| m + ls.exp() * rng::normal(rng))
            .collect();
        let log_prob = gaussian_log_prob(&mean, &self.log_std, &raw) - self.log_jacobian(&raw);
        Ok(ActionSample {
            action: self.squash(&raw),
            raw,
            log_prob,
        })
    }

    /// `log π(a | s)` of an action in the bounds.
    pub fn log_prob(&self, state: &[f64], action: &[f64]) -> Result<f64> {
        if action.len() != self.action_dim() {
            return Err(Error::DimensionMismatch {
                context: "policy action",
                expected: self.action_dim(),
                got: action.len(),
            });
        }
        let mean = self.mean(state)?;
        let u = self.unsquash(action);
        Ok(gaussian_log_prob(&mean, &self.log_std, &u) - self.log_jacobian(&u))
    }

    /// Differential entropy of the pre-squash Gaussian; state independent.
    pub fn entropy(&self) -> f64 {
        self.log_std.iter().map(|ls| ls + 0.5 + HALF_LN_2PI).sum()
    }

    /// Actor that always emits the squashed mean.
    pub fn deterministic(&self) -> Deterministic<'_> {
        Deterministic(self)
    }

    pub fn to_checkpoint(&self, seed: u64) -> Checkpoint {
        Checkpoint::new("gaussian_policy", seed)
            .with_net("mean", &self.mean_net)
            .with_vector("log_std", &self.log_std)
            .with_vector("action_low", &self.low)
            .with_vector("action_high", &self.high)
    }

    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        ckpt.expect_kind("gaussian_policy")?;
        let mean_net = ckpt.net("mean")?.clone();
        let log_std = ckpt.vector("log_std")?.to_vec();
        if log_std.len() != mean_net.output_dim() {
            return Err(Error::DimensionMismatch {
                context: "policy log_std",
                expected: mean_net.output_dim(),
                got: log_std.len(),
            });
        }
        Ok(Self {
            mean_net,
            log_std,
            low: ckpt.vector("action_low")?.to_vec(),
            high: ckpt.vector("action_high")?.to_vec(),
        })
    }

    pub fn save(&self, path: &Path, seed: u64) -> Result<()> {
        self.to_checkpoint(seed).save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&Checkpoint::load(path)?)
    }
}

impl Actor for GaussianPolicy {
    fn act(&self, state: &[f64], rng: &mut Rng64) -> Result<Vec<f64>> {
        Ok(self.sample_action(state, rng)?.action)
    }
}

pub struct Deterministic<'a>(&'a GaussianPolicy);

impl Actor for Deterministic<'_> {
    fn act(&self, state: &[f64], _rng: &mut Rng64) -> Result<Vec<f64>> {
        Ok(self.0.squash(&self.0.mean(state)?))
    }
}

pub(crate) fn gaussian_log_prob(mean: &[f64], log_std: &[f64], x: &[f64]) -> f64 {
    mean.iter()
        .zip(log_std)
        .zip(x)
        .map(|((m, ls), v)| {
            let z = (v - m) / ls.exp();
            -0.5 * z * z - ls - HALF_LN_2PI
        })
        .sum()
}

/// State-value baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueNet {
    pub net: Mlp,
}

impl ValueNet {
    pub fn new(state_dim: usize, arch: &MlpConfig, seed: u64) -> Self {
        let mut net = arch.build(state_dim, 1, seed);
        net.scale_output_layer(0.1);
        Self { net }
    }

    pub fn value(&self, state: &[f64]) -> Result<f64> {
        self.net.scalar(state)
    }
}
