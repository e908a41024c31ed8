//! Clipped-ratio policy optimisation with an entropy bonus.
//!
//! Each update computes generalised advantage estimates from the supplied
//! per-transition rewards, normalises them per batch, and then runs a few
//! epochs of minibatch steps on the clipped surrogate minus `λ·H(π)`. The
//! value baseline is regressed onto the GAE returns with its own optimizer.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{gaussian_log_prob, GaussianPolicy, ValueNet};
use crate::approx::{Adam, AdamConfig, MlpConfig};
use crate::env::{EnvSpec, Trajectory, Transition};
use crate::error::{ensure_finite, Error, Result};
use crate::rng::Rng64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolicyOptConfig {
    /// Entropy coefficient λ.
    pub entropy_coef: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    /// Ratio clip ε; `inf` disables clipping.
    pub clip_ratio: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub lr: f64,
    pub value_lr: f64,
    pub max_grad_norm: Option<f64>,
    pub init_log_std: f64,
    pub normalize_advantages: bool,
    pub arch: MlpConfig,
}

impl Default for PolicyOptConfig {
    fn default() -> Self {
        Self {
            entropy_coef: 0.0,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_ratio: 0.2,
            epochs: 10,
            minibatch_size: 64,
            lr: 3e-4,
            value_lr: 1e-3,
            max_grad_norm: Some(0.5),
            init_log_std: -0.5,
            normalize_advantages: true,
            arch: MlpConfig::default(),
        }
    }
}

impl PolicyOptConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.entropy_coef >= 0.0
            && (0.0..1.0).contains(&self.gamma)
            && (0.0..=1.0).contains(&self.gae_lambda)
            && self.clip_ratio > 0.0
            && self.epochs >= 1
            && self.minibatch_size >= 1
            && self.lr > 0.0
            && self.value_lr > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("policy optimizer settings out of range: {self:?}")))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct UpdateStats {
    pub entropy: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub mean_advantage_raw: f64,
}

/// Policy, value baseline and their optimizer states.
#[derive(Clone, Debug)]
pub struct MaxEntLearner {
    pub policy: GaussianPolicy,
    pub value: ValueNet,
    pub config: PolicyOptConfig,
    mean_opt: Adam,
    log_std_opt: Adam,
    value_opt: Adam,
}

/// Generalised advantage estimates for one trajectory.
///
/// `values[t] = V(s_t)`; `bootstrap` is `V(s_T)` when the trajectory was
/// truncated rather than terminated. Returns `(advantages, returns)`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = rewards.len();
    let mut adv = vec![0.0; n];
    let mut next_adv = 0.0;
    for t in (0..n).rev() {
        let next_value = if dones[t] {
            0.0
        } else if t + 1 < n {
            values[t + 1]
        } else {
            bootstrap
        };
        let cont = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value - values[t];
        next_adv = delta + gamma * lambda * cont * next_adv;
        adv[t] = next_adv;
    }
    let returns = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    (adv, returns)
}

struct Sample<'a> {
    t: &'a Transition,
    /// Pre-squash action. The squash Jacobian does not depend on the
    /// parameters, so ratios and gradients use the Gaussian density of `u`.
    u: Vec<f64>,
    old_log_prob: f64,
    advantage: f64,
    ret: f64,
}

impl MaxEntLearner {
    pub fn new(spec: &EnvSpec, config: PolicyOptConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let policy = GaussianPolicy::new(spec, &config.arch, config.init_log_std, seed);
        let value = ValueNet::new(spec.state_dim, &config.arch, seed ^ 0x5eed_0001);
        Ok(Self::from_parts(policy, value, config))
    }

    pub fn from_parts(policy: GaussianPolicy, value: ValueNet, config: PolicyOptConfig) -> Self {
        let opt = |lr| AdamConfig {
            lr,
            clip_norm: config.max_grad_norm,
            ..AdamConfig::default()
        };
        Self {
            mean_opt: Adam::for_net(&policy.mean_net, opt(config.lr)),
            log_std_opt: Adam::new(policy.action_dim(), opt(config.lr)),
            value_opt: Adam::for_net(&value.net, opt(config.value_lr)),
            policy,
            value,
            config,
        }
    }

    /// One optimisation round on `batch` with `rewards[i][t]` the reward of
    /// `batch[i][t]`.
    pub fn update(
        &mut self,
        batch: &[Trajectory],
        rewards: &[Vec<f64>],
        rng: &mut Rng64,
    ) -> Result<UpdateStats> {
        let total: usize = batch.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(Error::EmptyBatch("policy update"));
        }
        if rewards.len() != batch.len() || rewards.iter().zip(batch).any(|(r, t)| r.len() != t.len()) {
            return Err(Error::DimensionMismatch {
                context: "policy rewards",
                expected: total,
                got: rewards.iter().map(Vec::len).sum(),
            });
        }
        for r in rewards {
            ensure_finite(r, "policy reward")?;
        }
        let cfg = self.config.clone();

        let mut samples: Vec<Sample> = Vec::with_capacity(total);
        for (traj, rew) in batch.iter().zip(rewards) {
            if traj.is_empty() {
                continue;
            }
            let values = traj
                .iter()
                .map(|t| self.value.value(&t.s))
                .collect::<Result<Vec<f64>>>()?;
            let last = traj.last().unwrap();
            let bootstrap = if last.done { 0.0 } else { self.value.value(&last.s_next)? };
            let dones: Vec<bool> = traj.iter().map(|t| t.done).collect();
            let (adv, ret) = compute_gae(rew, &values, &dones, bootstrap, cfg.gamma, cfg.gae_lambda);
            for (i, t) in traj.iter().enumerate() {
                let u = self.policy.unsquash(&t.a);
                let mean = self.policy.mean(&t.s)?;
                samples.push(Sample {
                    t,
                    old_log_prob: gaussian_log_prob(&mean, self.policy.log_std(), &u),
                    u,
                    advantage: adv[i],
                    ret: ret[i],
                });
            }
        }

        let n = samples.len() as f64;
        let mean_adv = samples.iter().map(|s| s.advantage).sum::<f64>() / n;
        if cfg.normalize_advantages {
            let var = samples.iter().map(|s| (s.advantage - mean_adv).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            for s in &mut samples {
                s.advantage = if std > 1e-8 { (s.advantage - mean_adv) / std } else { 0.0 };
            }
        }

        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut stats = UpdateStats {
            mean_advantage_raw: mean_adv,
            ..UpdateStats::default()
        };
        let mut n_mb = 0usize;
        let mut clipped = 0usize;
        let mut seen = 0usize;
        let adim = self.policy.action_dim();
        for _ in 0..cfg.epochs {
            order.shuffle(rng);
            for chunk in order.chunks(cfg.minibatch_size) {
                let b = chunk.len() as f64;
                let mut log_std_grad = vec![0.0; adim];
                let mut pol_loss = 0.0;
                let mut val_loss = 0.0;
                let mut kl = 0.0;
                for &idx in chunk {
                    let smp = &samples[idx];
                    let t = smp.t;
                    let log_std = self.policy.log_std().to_vec();
                    let mean = self.policy.mean_net.forward_cached(&t.s)?;
                    let lp = gaussian_log_prob(&mean, &log_std, &smp.u);
                    let ratio = (lp - smp.old_log_prob).exp();
                    let a = smp.advantage;
                    let clipped_ratio = ratio.clamp(1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
                    let unclipped_obj = ratio * a;
                    let clipped_obj = clipped_ratio * a;
                    pol_loss -= unclipped_obj.min(clipped_obj) / b;
                    kl += (smp.old_log_prob - lp) / b;
                    // Gradient flows only when the unclipped term is the minimum.
                    let active = unclipped_obj <= clipped_obj;
                    if !active {
                        clipped += 1;
                    }
                    seen += 1;
                    let w = if active { ratio * a } else { 0.0 };
                    // d(-w log π)/dμ and d/d log σ.
                    let mut up = vec![0.0; adim];
                    for i in 0..adim {
                        let var = (2.0 * log_std[i]).exp();
                        let diff = smp.u[i] - mean[i];
                        up[i] = -w * diff / var / b;
                        log_std_grad[i] += -w * (diff * diff / var - 1.0) / b;
                    }
                    self.policy.mean_net.backward(&t.s, &up)?;

                    let v = self.value.net.forward_cached(&t.s)?[0];
                    val_loss += 0.5 * (v - smp.ret).powi(2) / b;
                    self.value.net.backward(&t.s, &[(v - smp.ret) / b])?;
                }
                // Entropy bonus: dH/d log σ_i = 1.
                for g in &mut log_std_grad {
                    *g -= cfg.entropy_coef;
                }
                pol_loss -= cfg.entropy_coef * self.policy.entropy();

                self.mean_opt.step_net(&mut self.policy.mean_net)?;
                let mut log_std = std::mem::take(self.policy.log_std_mut());
                self.log_std_opt.step(&mut log_std, &mut log_std_grad)?;
                *self.policy.log_std_mut() = log_std;
                self.policy.clamp_log_std();
                self.value_opt.step_net(&mut self.value.net)?;

                stats.policy_loss += pol_loss;
                stats.value_loss += val_loss;
                stats.approx_kl += kl;
                n_mb += 1;
            }
        }
        let m = n_mb.max(1) as f64;
        stats.policy_loss /= m;
        stats.value_loss /= m;
        stats.approx_kl /= m;
        stats.clip_fraction = clipped as f64 / seen.max(1) as f64;
        stats.entropy = self.policy.entropy();
        Ok(stats)
    }

    /// Computes per-transition rewards with `reward_fn` and runs [`Self::update`].
    pub fn update_with<F>(&mut self, batch: &[Trajectory], mut reward_fn: F, rng: &mut Rng64) -> Result<UpdateStats>
    where
        F: FnMut(&GaussianPolicy, &Transition) -> Result<f64>,
    {
        let mut rewards = Vec::with_capacity(batch.len());
        for traj in batch {
            let mut r = Vec::with_capacity(traj.len());
            for t in traj {
                r.push(reward_fn(&self.policy, t)?);
            }
            rewards.push(r);
        }
        self.update(batch, &rewards, rng)
    }
}
