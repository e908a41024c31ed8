use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{disc_logit, disc_prob, logistic_term, policy_reward, DiscSample, DiscStats, RewardInput};
use crate::approx::{Adam, AdamConfig, Checkpoint, FeatureMap, Mlp, MlpConfig};
use crate::env::{Domain, Transition};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscConfig {
    pub arch: MlpConfig,
    pub lr: f64,
    pub reward_input: RewardInput,
    /// Input map for `g` when it sees `(s, a)`.
    pub features: FeatureMap,
    /// Discount of the shaping term `γ h(s') - h(s)`.
    pub gamma: f64,
    /// Samples per side in each discriminator batch.
    pub batch_size: usize,
    pub steps_per_iter: usize,
    pub max_grad_norm: Option<f64>,
}

impl Default for DiscConfig {
    fn default() -> Self {
        Self {
            arch: MlpConfig::default(),
            lr: 3e-4,
            reward_input: RewardInput::StateOnly,
            features: FeatureMap::Concat,
            gamma: 0.99,
            batch_size: 64,
            steps_per_iter: 1,
            max_grad_norm: None,
        }
    }
}

impl DiscConfig {
    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.gamma) && self.lr > 0.0 && self.batch_size > 0 {
            Ok(())
        } else {
            Err(Error::Config(format!("discriminator settings out of range: {self:?}")))
        }
    }
}

/// `f(s, a, s') = g(s[, a]) + γ h(s') - h(s)` and the logistic
/// discriminator built on it.
#[derive(Clone, Debug)]
pub struct AirlDiscriminator {
    pub g: Mlp,
    pub h: Mlp,
    pub config: DiscConfig,
    state_dim: usize,
    action_dim: usize,
    sample_domain: Domain,
    opt_g: Adam,
    opt_h: Adam,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl AirlDiscriminator {
    pub fn new(state_dim: usize, action_dim: usize, config: DiscConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let g_in = match config.reward_input {
            RewardInput::StateOnly => state_dim,
            RewardInput::StateAction => config.features.dim(&[state_dim, action_dim]),
        };
        let g = config.arch.build(g_in, 1, seed);
        let h = config.arch.build(state_dim, 1, seed ^ 0x0005_4a9e);
        let opt = AdamConfig {
            lr: config.lr,
            clip_norm: config.max_grad_norm,
            ..AdamConfig::default()
        };
        Ok(Self {
            opt_g: Adam::for_net(&g, opt.clone()),
            opt_h: Adam::for_net(&h, opt),
            g,
            h,
            config,
            state_dim,
            action_dim,
            sample_domain: Domain::Target,
        })
    }

    /// Domain the generator samples come from (target unless training in
    /// the source domain).
    pub fn with_sample_domain(mut self, domain: Domain) -> Self {
        self.sample_domain = domain;
        self
    }

    fn g_input(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        match self.config.reward_input {
            RewardInput::StateOnly => s.to_vec(),
            RewardInput::StateAction => self.config.features.apply(&[s, a]),
        }
    }

    fn check(&self, t: &Transition) -> Result<()> {
        if t.s.len() != self.state_dim || t.s_next.len() != self.state_dim || t.a.len() != self.action_dim {
            return Err(Error::DimensionMismatch {
                context: "discriminator transition",
                expected: 2 * self.state_dim + self.action_dim,
                got: t.s.len() + t.a.len() + t.s_next.len(),
            });
        }
        Ok(())
    }

    pub fn g_value(&self, s: &[f64], a: &[f64]) -> Result<f64> {
        self.g.scalar(&self.g_input(s, a))
    }

    pub fn h_value(&self, s: &[f64]) -> Result<f64> {
        self.h.scalar(s)
    }

    pub fn f_value(&self, s: &[f64], a: &[f64], s_next: &[f64]) -> Result<f64> {
        let g = self.g_value(s, a)?;
        Ok(g + self.config.gamma * self.h_value(s_next)? - self.h_value(s)?)
    }

    pub fn f_transition(&self, t: &Transition) -> Result<f64> {
        self.f_value(&t.s, &t.a, &t.s_next)
    }

    /// Unclamped logit `(f + dd) - log π` for one sample.
    pub fn logit(&self, x: &DiscSample) -> Result<f64> {
        Ok(disc_logit(self.f_transition(x.transition)?, x.log_pi, x.dd))
    }

    /// `D` for one sample.
    pub fn prob(&self, x: &DiscSample) -> Result<f64> {
        Ok(disc_prob(self.logit(x)?))
    }

    /// Generator reward on a policy sample (no dynamics term).
    pub fn policy_reward(&self, t: &Transition, log_pi: f64, flip: bool) -> Result<f64> {
        Ok(policy_reward(self.f_transition(t)?, log_pi, flip))
    }

    /// Accumulates `df/dψ · upstream` into `g` and `h`.
    fn backward_f(&mut self, t: &Transition, upstream: f64) -> Result<f64> {
        let x = self.g_input(&t.s, &t.a);
        let g = self.g.forward_cached(&x)?[0];
        self.g.backward(&x, &[upstream])?;
        let h_next = self.h.forward_cached(&t.s_next)?[0];
        self.h.backward(&t.s_next, &[self.config.gamma * upstream])?;
        let h = self.h.forward_cached(&t.s)?[0];
        self.h.backward(&t.s, &[-upstream])?;
        Ok(g + self.config.gamma * h_next - h)
    }

    /// Logistic loss, demos labelled 1 and policy samples labelled 0, each
    /// side averaged separately. Gradients are accumulated into `g` and `h`.
    pub fn disc_loss(&mut self, demos: &[DiscSample], samples: &[DiscSample]) -> Result<DiscStats> {
        if demos.is_empty() {
            return Err(Error::EmptyBatch("discriminator demo batch"));
        }
        if samples.is_empty() {
            return Err(Error::EmptyBatch("discriminator policy batch"));
        }
        for (batch, tag) in [(demos, Domain::Source), (samples, self.sample_domain)] {
            if let Some(x) = batch.iter().find(|x| x.transition.domain != tag) {
                return Err(Error::TagMismatch {
                    expected: tag,
                    got: x.transition.domain,
                });
            }
        }
        let mut stats = DiscStats::default();
        for (batch, demo) in [(demos, true), (samples, false)] {
            let n = batch.len() as f64;
            for x in batch {
                self.check(x.transition)?;
                let f = self.f_transition(x.transition)?;
                let logit = disc_logit(f, x.log_pi, x.dd);
                let (loss, dlogit) = logistic_term(logit, demo);
                stats.loss += loss / n;
                let d = disc_prob(logit);
                if demo {
                    stats.demo_accuracy += f64::from(u8::from(d > 0.5)) / n;
                } else {
                    stats.policy_accuracy += f64::from(u8::from(d < 0.5)) / n;
                }
                if dlogit != 0.0 {
                    self.backward_f(x.transition, dlogit / n)?;
                }
            }
        }
        Ok(stats)
    }

    /// One optimizer step on the discriminator loss.
    pub fn update(&mut self, demos: &[DiscSample], samples: &[DiscSample]) -> Result<DiscStats> {
        let stats = self.disc_loss(demos, samples)?;
        self.opt_g.step_net(&mut self.g)?;
        self.opt_h.step_net(&mut self.h)?;
        Ok(stats)
    }

    /// Adds `c` to the output of `h`.
    pub fn shift_h(&mut self, c: f64) {
        let n = self.h.params().len();
        self.h.params_mut()[n - 1] += c;
    }

    /// `g` at the centre of every cell of an `n × n` grid over `[0, 1]²`,
    /// row-major in `y` then `x`.
    pub fn reward_heatmap(&self, n: usize) -> Result<Vec<HeatmapCell>> {
        if self.config.reward_input != RewardInput::StateOnly || self.state_dim != 2 {
            return Err(Error::HeatmapUndefined);
        }
        let mut cells = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let x = (i as f64 + 0.5) / n as f64;
                let y = (j as f64 + 0.5) / n as f64;
                let value = self.g.scalar(&[x, y])?;
                cells.push(HeatmapCell { x, y, value });
            }
        }
        Ok(cells)
    }

    pub fn to_checkpoint(&self, seed: u64) -> Checkpoint {
        Checkpoint::new("airl_discriminator", seed)
            .with_net("g", &self.g)
            .with_net("h", &self.h)
            .with_vector("gamma", &[self.config.gamma])
    }

    pub fn save(&self, path: &Path, seed: u64) -> Result<()> {
        self.to_checkpoint(seed).save(path)
    }

    /// Restores `g` and `h` from a checkpoint; optimizer state restarts.
    pub fn load_weights(&mut self, path: &Path) -> Result<()> {
        let ckpt = Checkpoint::load(path)?;
        ckpt.expect_kind("airl_discriminator")?;
        let (g, h) = (ckpt.net("g")?, ckpt.net("h")?);
        if g.shapes() != self.g.shapes() || h.shapes() != self.h.shapes() {
            return Err(Error::DimensionMismatch {
                context: "discriminator checkpoint",
                expected: self.g.params().len() + self.h.params().len(),
                got: g.params().len() + h.params().len(),
            });
        }
        self.g = g.clone();
        self.h = h.clone();
        let opt = AdamConfig {
            lr: self.config.lr,
            clip_norm: self.config.max_grad_norm,
            ..AdamConfig::default()
        };
        self.opt_g = Adam::for_net(&self.g, opt.clone());
        self.opt_h = Adam::for_net(&self.h, opt);
        Ok(())
    }
}

/// Writes heatmap cells as CSV with columns `x,y,value`.
pub fn write_heatmap<W: Write>(w: W, cells: &[HeatmapCell]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for c in cells {
        out.serialize(c)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::Activation;

    fn disc(gamma: f64, input: RewardInput) -> AirlDiscriminator {
        let cfg = DiscConfig {
            gamma,
            reward_input: input,
            arch: MlpConfig::new(vec![8], Activation::Tanh),
            ..DiscConfig::default()
        };
        AirlDiscriminator::new(2, 2, cfg, 3).unwrap()
    }

    fn zero(net: &mut Mlp) {
        net.params_mut().iter_mut().for_each(|v| *v = 0.0);
    }

    fn t(s: [f64; 2], s2: [f64; 2], d: Domain) -> Transition {
        Transition::new(s.to_vec(), vec![0.1, -0.2], s2.to_vec(), false, d, 0.0)
    }

    #[test]
    fn zero_h_gives_g() {
        let mut d = disc(0.9, RewardInput::StateAction);
        zero(&mut d.h);
        let f = d.f_value(&[0.2, 0.3], &[0.1, 0.1], &[0.5, 0.5]).unwrap();
        assert_eq!(f, d.g_value(&[0.2, 0.3], &[0.1, 0.1]).unwrap());
    }

    #[test]
    fn zero_g_and_gamma_zero_gives_minus_h() {
        let mut d = disc(0.0, RewardInput::StateOnly);
        zero(&mut d.g);
        let f = d.f_value(&[0.2, 0.3], &[0.0, 0.0], &[0.9, 0.1]).unwrap();
        assert_eq!(f, -d.h_value(&[0.2, 0.3]).unwrap());
    }

    #[test]
    fn telescoping_sum() {
        let mut d = disc(1.0, RewardInput::StateOnly);
        zero(&mut d.g);
        let states = [[0.1, 0.1], [0.3, 0.2], [0.4, 0.6], [0.9, 0.8]];
        let sum: f64 = states
            .windows(2)
            .map(|w| d.f_value(&w[0], &[0.0, 0.0], &w[1]).unwrap())
            .sum();
        let expect = d.h_value(&states[3]).unwrap() - d.h_value(&states[0]).unwrap();
        assert!((sum - expect).abs() < 1e-12);
    }

    #[test]
    fn empty_and_mislabelled_batches_rejected() {
        let mut d = disc(0.9, RewardInput::StateOnly);
        let demo = t([0.1, 0.1], [0.2, 0.2], Domain::Source);
        let pol = t([0.1, 0.1], [0.2, 0.2], Domain::Target);
        let ds = [DiscSample::new(&demo, 0.0)];
        let ps = [DiscSample::new(&pol, 0.0)];
        assert!(matches!(d.disc_loss(&ds, &[]), Err(Error::EmptyBatch(_))));
        assert!(matches!(d.disc_loss(&[], &ps), Err(Error::EmptyBatch(_))));
        assert!(matches!(d.disc_loss(&ps, &ps), Err(Error::TagMismatch { .. })));
        assert!(d.disc_loss(&ds, &ps).is_ok());
    }

    #[test]
    fn identical_batches_stay_near_two_ln_two() {
        let mut d = disc(0.9, RewardInput::StateOnly);
        let mut demos = Vec::new();
        let mut pols = Vec::new();
        for i in 0..20 {
            let s = [0.05 * i as f64, 0.3];
            demos.push(t(s, [s[0] + 0.01, 0.3], Domain::Source));
            pols.push(t(s, [s[0] + 0.01, 0.3], Domain::Target));
        }
        let ds: Vec<_> = demos.iter().map(|x| DiscSample::new(x, -1.0)).collect();
        let ps: Vec<_> = pols.iter().map(|x| DiscSample::new(x, -1.0)).collect();
        let mut last = DiscStats::default();
        for _ in 0..200 {
            last = d.update(&ds, &ps).unwrap();
        }
        assert!(last.loss >= 2.0 * 2f64.ln() - 1e-9);
    }

    #[test]
    fn heatmap_shape_and_zero_net() {
        let mut d = disc(0.9, RewardInput::StateOnly);
        zero(&mut d.g);
        let cells = d.reward_heatmap(50).unwrap();
        assert_eq!(cells.len(), 2500);
        assert!(cells.iter().all(|c| c.value == 0.0));
        let mut buf = Vec::new();
        write_heatmap(&mut buf, &cells).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,value\n"));
        assert_eq!(text.lines().count(), 2501);
        let sa = disc(0.9, RewardInput::StateAction);
        assert!(matches!(sa.reward_heatmap(5), Err(Error::HeatmapUndefined)));
    }

    #[test]
    fn checkpoint_round_trip() {
        let d = disc(0.9, RewardInput::StateAction);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.ckpt");
        d.save(&path, 3).unwrap();
        let mut e = disc(0.9, RewardInput::StateAction);
        e.shift_h(1.0);
        e.load_weights(&path).unwrap();
        assert_eq!(d.g, e.g);
        assert_eq!(d.h, e.h);
    }
}
