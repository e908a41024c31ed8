use super::{clamp_logit, disc_prob, logistic_term, DiscStats, DiscSample};
use crate::approx::{log_sigmoid, Adam, AdamConfig, Checkpoint, Mlp};
use crate::env::{Domain, Transition};
use crate::error::{Error, Result};
use crate::irl::DiscConfig;

/// Plain `(s, a) → logit` classifier; the generator reward is
/// `-log(1 - D(s, a))`.
#[derive(Clone, Debug)]
pub struct GailDiscriminator {
    pub d_net: Mlp,
    config: DiscConfig,
    opt: Adam,
}

impl GailDiscriminator {
    pub fn new(state_dim: usize, action_dim: usize, config: DiscConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let d_net = config.arch.build(config.features.dim(&[state_dim, action_dim]), 1, seed);
        let opt = Adam::for_net(
            &d_net,
            AdamConfig {
                lr: config.lr,
                clip_norm: config.max_grad_norm,
                ..AdamConfig::default()
            },
        );
        Ok(Self { d_net, config, opt })
    }

    fn input(&self, t: &Transition) -> Vec<f64> {
        self.config.features.apply(&[&t.s, &t.a])
    }

    pub fn logit(&self, t: &Transition) -> Result<f64> {
        self.d_net.scalar(&self.input(t))
    }

    pub fn prob(&self, t: &Transition) -> Result<f64> {
        Ok(disc_prob(self.logit(t)?))
    }

    /// `-log(1 - D)` with the logit clamped, so at most about 10.
    pub fn policy_reward(&self, t: &Transition) -> Result<f64> {
        Ok(-log_sigmoid(-clamp_logit(self.logit(t)?)))
    }

    /// Logistic loss (demos 1, policy samples 0); `log_pi` and `dd` of the
    /// samples are ignored. Accumulates gradients.
    pub fn disc_loss(&mut self, demos: &[DiscSample], samples: &[DiscSample]) -> Result<DiscStats> {
        if demos.is_empty() {
            return Err(Error::EmptyBatch("discriminator demo batch"));
        }
        if samples.is_empty() {
            return Err(Error::EmptyBatch("discriminator policy batch"));
        }
        if let Some(x) = demos.iter().find(|x| x.transition.domain != Domain::Source) {
            return Err(Error::TagMismatch {
                expected: Domain::Source,
                got: x.transition.domain,
            });
        }
        let mut stats = DiscStats::default();
        for (batch, demo) in [(demos, true), (samples, false)] {
            let n = batch.len() as f64;
            for x in batch {
                let input = self.input(x.transition);
                let logit = self.d_net.forward_cached(&input)?[0];
                let (loss, dlogit) = logistic_term(logit, demo);
                stats.loss += loss / n;
                let d = disc_prob(logit);
                if demo {
                    stats.demo_accuracy += f64::from(u8::from(d > 0.5)) / n;
                } else {
                    stats.policy_accuracy += f64::from(u8::from(d < 0.5)) / n;
                }
                self.d_net.backward(&input, &[dlogit / n])?;
            }
        }
        Ok(stats)
    }

    pub fn update(&mut self, demos: &[DiscSample], samples: &[DiscSample]) -> Result<DiscStats> {
        let stats = self.disc_loss(demos, samples)?;
        self.opt.step_net(&mut self.d_net)?;
        Ok(stats)
    }

    pub fn to_checkpoint(&self, seed: u64) -> Checkpoint {
        Checkpoint::new("gail_discriminator", seed).with_net("d", &self.d_net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{Activation, MlpConfig};

    fn t(s: f64, d: Domain) -> Transition {
        Transition::new(vec![s], vec![0.0], vec![s], false, d, 0.0)
    }

    fn gail() -> GailDiscriminator {
        let cfg = DiscConfig {
            arch: MlpConfig::new(vec![16], Activation::Tanh),
            lr: 1e-2,
            ..DiscConfig::default()
        };
        GailDiscriminator::new(1, 1, cfg, 7).unwrap()
    }

    #[test]
    fn reward_is_capped_by_clamp() {
        let mut g = gail();
        let n = g.d_net.params().len();
        g.d_net.params_mut()[n - 1] = 1e6;
        let r = g.policy_reward(&t(0.0, Domain::Target)).unwrap();
        assert!((r - (-log_sigmoid(-10.0))).abs() < 1e-12);
        assert!(r < 10.001);
    }

    #[test]
    fn disjoint_supports_are_separated() {
        let mut g = gail();
        let demos: Vec<_> = (0..16).map(|i| t(0.5 + 0.02 * i as f64, Domain::Source)).collect();
        let pols: Vec<_> = (0..16).map(|i| t(-0.5 - 0.02 * i as f64, Domain::Target)).collect();
        let ds: Vec<_> = demos.iter().map(|x| DiscSample::new(x, 0.0)).collect();
        let ps: Vec<_> = pols.iter().map(|x| DiscSample::new(x, 0.0)).collect();
        let mut stats = DiscStats::default();
        for _ in 0..300 {
            stats = g.update(&ds, &ps).unwrap();
        }
        assert_eq!(stats.demo_accuracy, 1.0);
        assert_eq!(stats.policy_accuracy, 1.0);
    }

    #[test]
    fn indistinguishable_batches_stay_at_two_ln_two() {
        let mut g = gail();
        let demos: Vec<_> = (0..16).map(|i| t(0.05 * i as f64, Domain::Source)).collect();
        let pols: Vec<_> = (0..16).map(|i| t(0.05 * i as f64, Domain::Target)).collect();
        let ds: Vec<_> = demos.iter().map(|x| DiscSample::new(x, 0.0)).collect();
        let ps: Vec<_> = pols.iter().map(|x| DiscSample::new(x, 0.0)).collect();
        let mut stats = DiscStats::default();
        for _ in 0..200 {
            stats = g.update(&ds, &ps).unwrap();
        }
        assert!((stats.loss - 2.0 * 2f64.ln()).abs() < 1e-3);
    }
}
