//! Domain classifiers and the dynamics-difference estimate.
//!
//! Two classifiers tell source from target transitions: `q_sas` sees
//! `(s, a, s')` and `q_sa` sees `(s, a)`. By Bayes' rule
//!
//! ```text
//! log p_tgt(s'|s,a) - log p_src(s'|s,a)
//!     = [log q_sas(tgt|s,a,s') - log q_sas(src|s,a,s')]
//!     - [log q_sa(tgt|s,a)     - log q_sa(src|s,a)]
//! ```
//!
//! Output index 0 is the source class and index 1 the target class.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::approx::{log_softmax, Adam, AdamConfig, Checkpoint, FeatureMap, Mlp, MlpConfig};
use crate::env::{Domain, Transition};
use crate::error::{Error, Result};
use crate::rng::{self, Rng64};

const SOURCE: usize = 0;
const TARGET: usize = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DDConfig {
    /// Scale applied to the clamped log-ratio.
    pub alpha: f64,
    /// Absolute clamp on the log-ratio before scaling.
    pub dd_clip: Option<f64>,
    /// Std of Gaussian noise added to classifier inputs while training.
    pub noise_std: f64,
    pub lr: f64,
    /// Transitions per class in each classifier batch.
    pub batch_size: usize,
    /// Classifier steps per training iteration.
    pub steps_per_iter: usize,
    pub arch: MlpConfig,
    pub features: FeatureMap,
}

impl Default for DDConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            dd_clip: Some(5.0),
            noise_std: 0.01,
            lr: 3e-4,
            batch_size: 64,
            steps_per_iter: 1,
            arch: MlpConfig::default(),
            features: FeatureMap::Concat,
        }
    }
}

impl DDConfig {
    pub fn validate(&self) -> Result<()> {
        let clip_ok = self.dd_clip.is_none_or(|c| c > 0.0);
        if self.alpha >= 0.0 && clip_ok && self.noise_std >= 0.0 && self.lr > 0.0 && self.batch_size > 0 {
            Ok(())
        } else {
            Err(Error::Config(format!("dd settings out of range: {self:?}")))
        }
    }
}

/// Per-step classifier diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClassifierLoss {
    pub sas: f64,
    pub sa: f64,
    /// Accuracy of the `(s, a, s')` classifier on the batch.
    pub accuracy_sas: f64,
    pub accuracy_sa: f64,
}

impl ClassifierLoss {
    pub fn total(&self) -> f64 {
        self.sas + self.sa
    }
}

#[derive(Clone, Debug)]
pub struct ClassifierPair {
    pub q_sas: Mlp,
    pub q_sa: Mlp,
    pub config: DDConfig,
    state_dim: usize,
    action_dim: usize,
    opt_sas: Adam,
    opt_sa: Adam,
}

impl ClassifierPair {
    pub fn new(state_dim: usize, action_dim: usize, config: DDConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let f = config.features;
        let q_sas = config.arch.build(f.dim(&[state_dim, action_dim, state_dim]), 2, seed);
        let q_sa = config.arch.build(f.dim(&[state_dim, action_dim]), 2, seed ^ 0x00c1_a551);
        let opt = AdamConfig::with_lr(config.lr);
        Ok(Self {
            opt_sas: Adam::for_net(&q_sas, opt.clone()),
            opt_sa: Adam::for_net(&q_sa, opt),
            q_sas,
            q_sa,
            config,
            state_dim,
            action_dim,
        })
    }

    fn sas_input(&self, s: &[f64], a: &[f64], s_next: &[f64]) -> Vec<f64> {
        self.config.features.apply(&[s, a, s_next])
    }

    fn sa_input(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        self.config.features.apply(&[s, a])
    }

    fn check_dims(&self, t: &Transition) -> Result<()> {
        if t.s.len() != self.state_dim || t.s_next.len() != self.state_dim || t.a.len() != self.action_dim {
            return Err(Error::DimensionMismatch {
                context: "classifier transition",
                expected: 2 * self.state_dim + self.action_dim,
                got: t.s.len() + t.a.len() + t.s_next.len(),
            });
        }
        Ok(())
    }

    /// Cross-entropy `ℓ_SAS + ℓ_SA` over the union of both batches, with
    /// gradients accumulated into both classifiers. Inputs are perturbed by
    /// `noise_std` Gaussian noise drawn from `rng`.
    pub fn classifier_loss(
        &mut self,
        source_batch: &[Transition],
        target_batch: &[Transition],
        rng: &mut Rng64,
    ) -> Result<ClassifierLoss> {
        if source_batch.is_empty() {
            return Err(Error::EmptyBatch("classifier source batch"));
        }
        if target_batch.is_empty() {
            return Err(Error::EmptyBatch("classifier target batch"));
        }
        for (batch, tag) in [(source_batch, Domain::Source), (target_batch, Domain::Target)] {
            if let Some(t) = batch.iter().find(|t| t.domain != tag) {
                return Err(Error::TagMismatch {
                    expected: tag,
                    got: t.domain,
                });
            }
        }
        let n = (source_batch.len() + target_batch.len()) as f64;
        let noise = self.config.noise_std;
        let mut out = ClassifierLoss::default();
        let labelled = source_batch
            .iter()
            .map(|t| (t, SOURCE))
            .chain(target_batch.iter().map(|t| (t, TARGET)));
        for (t, label) in labelled {
            self.check_dims(t)?;
            let mut jitter = |v: &[f64]| -> Vec<f64> {
                if noise > 0.0 {
                    v.iter().map(|x| x + noise * rng::normal(rng)).collect()
                } else {
                    v.to_vec()
                }
            };
            let s = jitter(&t.s);
            let a = jitter(&t.a);
            let s_next = jitter(&t.s_next);

            let x_sas = self.sas_input(&s, &a, &s_next);
            let (loss, correct) = cross_entropy_step(&mut self.q_sas, &x_sas, label, n)?;
            out.sas += loss;
            out.accuracy_sas += correct / n;

            let x_sa = self.sa_input(&s, &a);
            let (loss, correct) = cross_entropy_step(&mut self.q_sa, &x_sa, label, n)?;
            out.sa += loss;
            out.accuracy_sa += correct / n;
        }
        Ok(out)
    }

    /// One optimizer step on both classifiers.
    pub fn train_step(
        &mut self,
        source_batch: &[Transition],
        target_batch: &[Transition],
        rng: &mut Rng64,
    ) -> Result<ClassifierLoss> {
        let loss = self.classifier_loss(source_batch, target_batch, rng)?;
        self.opt_sas.step_net(&mut self.q_sas)?;
        self.opt_sa.step_net(&mut self.q_sa)?;
        Ok(loss)
    }

    /// Unscaled, unclipped log-ratio estimate.
    pub fn raw_log_ratio(&self, s: &[f64], a: &[f64], s_next: &[f64]) -> Result<f64> {
        let l_sas = self.q_sas.forward(&self.sas_input(s, a, s_next))?;
        let l_sa = self.q_sa.forward(&self.sa_input(s, a))?;
        // A log-softmax difference between two classes is the logit difference.
        Ok((l_sas[TARGET] - l_sas[SOURCE]) - (l_sa[TARGET] - l_sa[SOURCE]))
    }

    /// `α · clamp(raw, ±dd_clip)`.
    pub fn dd_value(&self, s: &[f64], a: &[f64], s_next: &[f64]) -> Result<f64> {
        let raw = self.raw_log_ratio(s, a, s_next)?;
        Ok(self.config.alpha * self.clip(raw))
    }

    pub fn dd_transition(&self, t: &Transition) -> Result<f64> {
        self.dd_value(&t.s, &t.a, &t.s_next)
    }

    fn clip(&self, raw: f64) -> f64 {
        match self.config.dd_clip {
            Some(c) => raw.clamp(-c, c),
            None => raw,
        }
    }

    /// `P(target | s, a, s')` under `q_sas`.
    pub fn prob_target_sas(&self, s: &[f64], a: &[f64], s_next: &[f64]) -> Result<f64> {
        let l = self.q_sas.forward(&self.sas_input(s, a, s_next))?;
        Ok(log_softmax(&l)[TARGET].exp())
    }

    /// Exchanges the meaning of the two output classes in both classifiers.
    pub fn swap_labels(&mut self) {
        for net in [&mut self.q_sas, &mut self.q_sa] {
            let last = *net.shapes().last().unwrap();
            let total = net.params().len();
            let off = total - last.outputs * (last.inputs + 1);
            let p = net.params_mut();
            for i in 0..last.inputs {
                p.swap(off + i, off + last.inputs + i);
            }
            let bias = off + last.outputs * last.inputs;
            p.swap(bias, bias + 1);
        }
    }

    pub fn to_checkpoint(&self, seed: u64) -> Checkpoint {
        Checkpoint::new("classifier_pair", seed)
            .with_net("q_sas", &self.q_sas)
            .with_net("q_sa", &self.q_sa)
    }

    pub fn save(&self, path: &Path, seed: u64) -> Result<()> {
        self.to_checkpoint(seed).save(path)
    }

    /// Restores network weights from a checkpoint; optimizer state restarts.
    pub fn load_weights(&mut self, path: &Path) -> Result<()> {
        let ckpt = Checkpoint::load(path)?;
        ckpt.expect_kind("classifier_pair")?;
        let (sas, sa) = (ckpt.net("q_sas")?, ckpt.net("q_sa")?);
        if sas.shapes() != self.q_sas.shapes() || sa.shapes() != self.q_sa.shapes() {
            return Err(Error::DimensionMismatch {
                context: "classifier checkpoint",
                expected: self.q_sas.params().len() + self.q_sa.params().len(),
                got: sas.params().len() + sa.params().len(),
            });
        }
        self.q_sas = sas.clone();
        self.q_sa = sa.clone();
        self.opt_sas = Adam::for_net(&self.q_sas, AdamConfig::with_lr(self.config.lr));
        self.opt_sa = Adam::for_net(&self.q_sa, AdamConfig::with_lr(self.config.lr));
        Ok(())
    }
}

/// Mean-scaled cross-entropy of a 2-class logit net on one example. Returns
/// `(loss / n, 1 if argmax is correct)`.
fn cross_entropy_step(net: &mut Mlp, x: &[f64], label: usize, n: f64) -> Result<(f64, f64)> {
    let logits = net.forward_cached(x)?;
    let ls = log_softmax(&logits);
    let up: Vec<f64> = ls
        .iter()
        .enumerate()
        .map(|(k, l)| (l.exp() - if k == label { 1.0 } else { 0.0 }) / n)
        .collect();
    net.backward(x, &up)?;
    let predicted = if logits[TARGET] > logits[SOURCE] { TARGET } else { SOURCE };
    Ok((-ls[label] / n, if predicted == label { 1.0 } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::Activation;
    use proptest::prelude::*;

    fn tr(s: f64, a: f64, s2: f64, d: Domain) -> Transition {
        Transition::new(vec![s], vec![a], vec![s2], false, d, 0.0)
    }

    fn zeroed(config: DDConfig) -> ClassifierPair {
        let mut p = ClassifierPair::new(1, 1, config, 1).unwrap();
        p.q_sas.params_mut().iter_mut().for_each(|v| *v = 0.0);
        p.q_sa.params_mut().iter_mut().for_each(|v| *v = 0.0);
        p
    }

    fn set_bias(net: &mut Mlp, b: [f64; 2]) {
        let n = net.params().len();
        net.params_mut()[n - 2] = b[0];
        net.params_mut()[n - 1] = b[1];
    }

    #[test]
    fn uniform_logits_give_two_ln_two() {
        let mut p = zeroed(DDConfig { noise_std: 0.0, ..DDConfig::default() });
        let l = p
            .classifier_loss(&[tr(0.0, 0.0, 0.0, Domain::Source)], &[tr(1.0, 1.0, 1.0, Domain::Target)], &mut rng::from_seed(0))
            .unwrap();
        assert!((l.total() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(p.dd_value(&[0.3], &[0.1], &[0.2]).unwrap(), 0.0);
    }

    #[test]
    fn direct_substitution() {
        let mut p = zeroed(DDConfig { alpha: 1.0, dd_clip: None, ..DDConfig::default() });
        // p(target | s,a,s') = 0.8 ⇔ logit difference ln 4.
        set_bias(&mut p.q_sas, [0.0, 4f64.ln()]);
        set_bias(&mut p.q_sa, [0.7, 0.7]);
        let dd = p.dd_value(&[0.0], &[0.0], &[0.0]).unwrap();
        assert!((dd - 4f64.ln()).abs() < 1e-12);
        assert!((p.prob_target_sas(&[0.0], &[0.0], &[0.0]).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn clip_bounds_dd() {
        let mut p = zeroed(DDConfig { alpha: 2.0, dd_clip: Some(5.0), ..DDConfig::default() });
        set_bias(&mut p.q_sas, [0.0, 40.0]);
        assert_eq!(p.dd_value(&[0.0], &[0.0], &[0.0]).unwrap(), 10.0);
    }

    #[test]
    fn single_domain_batch_is_rejected() {
        let mut p = zeroed(DDConfig::default());
        let s = [tr(0.0, 0.0, 0.0, Domain::Source)];
        let r = &mut rng::from_seed(0);
        assert!(matches!(p.classifier_loss(&s, &[], r), Err(Error::EmptyBatch(_))));
        assert!(matches!(p.classifier_loss(&s, &s, r), Err(Error::TagMismatch { .. })));
    }

    #[test]
    fn separable_domains_train_to_near_zero_loss() {
        let cfg = DDConfig {
            lr: 1e-2,
            noise_std: 0.0,
            arch: MlpConfig::new(vec![16], Activation::Tanh),
            ..DDConfig::default()
        };
        let mut p = ClassifierPair::new(1, 1, cfg, 5).unwrap();
        let mut r = rng::from_seed(3);
        let mut loss = ClassifierLoss::default();
        // Disjoint s' supports, identical (s, a).
        for _ in 0..600 {
            let src: Vec<_> = (0..32).map(|i| tr(0.0, 0.0, -1.0 - 0.01 * i as f64, Domain::Source)).collect();
            let tgt: Vec<_> = (0..32).map(|i| tr(0.0, 0.0, 1.0 + 0.01 * i as f64, Domain::Target)).collect();
            loss = p.train_step(&src, &tgt, &mut r).unwrap();
        }
        assert!(loss.sas < 0.05, "ℓ_SAS = {}", loss.sas);
        assert!((loss.sa - 2f64.ln()).abs() < 0.01);
    }

    #[test]
    fn swapped_labels_negate_dd_exactly() {
        let mut p = ClassifierPair::new(1, 1, DDConfig { dd_clip: None, ..DDConfig::default() }, 8).unwrap();
        let xs = [(0.1, -0.4, 0.7), (-0.9, 0.2, 0.0), (0.5, 0.5, -0.3)];
        let before: Vec<f64> = xs.iter().map(|&(s, a, n)| p.dd_value(&[s], &[a], &[n]).unwrap()).collect();
        p.swap_labels();
        for (&(s, a, n), b) in xs.iter().zip(before) {
            assert_eq!(p.dd_value(&[s], &[a], &[n]).unwrap(), -b);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let p = ClassifierPair::new(2, 1, DDConfig::default(), 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dd.ckpt");
        p.save(&path, 4).unwrap();
        let mut q = ClassifierPair::new(2, 1, DDConfig::default(), 99).unwrap();
        q.load_weights(&path).unwrap();
        assert_eq!(p.q_sas, q.q_sas);
        assert_eq!(p.q_sa, q.q_sa);
    }

    proptest! {
        #[test]
        fn alpha_scales_linearly(c in 0.0f64..10.0, s in -1.0f64..1.0, a in -1.0f64..1.0, n in -1.0f64..1.0) {
            let unit = ClassifierPair::new(1, 1, DDConfig { alpha: 1.0, dd_clip: None, ..DDConfig::default() }, 2).unwrap();
            let mut scaled = unit.clone();
            scaled.config.alpha = c;
            let x = unit.dd_value(&[s], &[a], &[n]).unwrap();
            prop_assert_eq!(scaled.dd_value(&[s], &[a], &[n]).unwrap(), c * x);
        }
    }
}
