//! Contracts of the outer training loop and the classifier estimate.

mod common;

use std::fs;
use std::path::Path;

use common::{one_hot, transition};
use odirl::approx::{Activation, FeatureMap, MlpConfig};
use odirl::dd::{ClassifierPair, DDConfig};
use odirl::env::{Domain, GroundTruth, Transition};
use odirl::harness::{self, read_progress, ExperimentConfig, Method, Task};
use odirl::rng;

/// Cheap settings: tiny networks and one optimizer pass per iteration.
fn quick(task: Task, dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(task);
    cfg.out_dir = dir.to_path_buf();
    cfg.demos.path = dir.join("demos.csv");
    cfg.demos.expert_path = dir.join("expert.ckpt");
    cfg.demos.episodes = 5;
    cfg.demos.successful_only = false;
    cfg.expert.iterations = 2;
    cfg.seeds = vec![0];
    cfg.eval_episodes = 2;
    let small = MlpConfig::new(vec![8], Activation::Tanh);
    cfg.policy.arch = small.clone();
    cfg.policy.epochs = 1;
    cfg.expert.policy.arch = small.clone();
    cfg.disc.arch = small.clone();
    cfg.dd.arch = small;
    cfg.dd.batch_size = 16;
    cfg.disc.batch_size = 16;
    cfg
}

#[test]
fn source_rollouts_follow_the_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(Task::Pointmaze, dir.path());
    cfg.steps = 300;
    cfg.ratio = Some(30);
    cfg.eval_every = 300;
    harness::prepare_demos(&cfg).unwrap();
    let run = dir.path().join("run");
    let s = harness::run_seed(&cfg, 0, &run, "odirl").unwrap();
    assert_eq!(s.source_rollouts, 10);
    let rows = read_progress(&run.join("progress.csv")).unwrap();
    assert_eq!(rows.len(), 300);
    let mut prev = 0;
    for r in &rows {
        let collected = r.source_steps > prev;
        assert_eq!(collected, (r.iteration - 1) % 30 == 0, "iteration {}", r.iteration);
        prev = r.source_steps;
    }
    // Evaluation happens only on the configured grid.
    assert_eq!(rows.iter().filter(|r| r.gt_return.is_some()).count(), 1);
}

#[test]
fn ground_truth_never_reaches_learning() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(Task::Linkchain, dir.path());
    cfg.steps = 20;
    cfg.ratio = Some(5);
    cfg.eval_every = 10;
    harness::prepare_demos(&cfg).unwrap();
    harness::run_seed(&cfg, 0, &dir.path().join("honest"), "odirl").unwrap();
    // Same dynamics, different evaluation reward.
    cfg.linkchain.ground_truth = GroundTruth::ForwardVelocity;
    harness::run_seed(&cfg, 0, &dir.path().join("poisoned"), "odirl").unwrap();
    for f in ["policy.ckpt", "disc.ckpt", "classifiers.ckpt"] {
        let a = fs::read(dir.path().join("honest/checkpoints").join(f)).unwrap();
        let b = fs::read(dir.path().join("poisoned/checkpoints").join(f)).unwrap();
        assert!(a == b, "{f} depends on the ground-truth reward");
    }
    let a = read_progress(&dir.path().join("honest/progress.csv")).unwrap();
    let b = read_progress(&dir.path().join("poisoned/progress.csv")).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.disc_loss, x.classifier_loss, x.mean_dd), (y.disc_loss, y.classifier_loss, y.mean_dd));
    }
    assert!(a.iter().zip(&b).any(|(x, y)| x.gt_return != y.gt_return));
}

#[test]
fn airl_is_odirl_without_the_offset() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(Task::Pointmaze, dir.path());
    cfg.steps = 12;
    cfg.ratio = Some(4);
    cfg.eval_every = 6;
    harness::prepare_demos(&cfg).unwrap();
    cfg.method = Method::Airl;
    harness::run_seed(&cfg, 0, &dir.path().join("airl"), "airl").unwrap();
    cfg.method = Method::Odirl;
    cfg.alpha = 0.0;
    cfg.sync();
    harness::run_seed(&cfg, 0, &dir.path().join("odirl"), "odirl").unwrap();
    assert_eq!(
        fs::read(dir.path().join("airl/progress.csv")).unwrap(),
        fs::read(dir.path().join("odirl/progress.csv")).unwrap()
    );
}

const NS: usize = 3;
const NA: usize = 2;

/// Transitions with exact multiplicities `total · p(s,a) · P(s'|s,a)`.
fn tabular(p_sa: &[[f64; NA]; NS], dynamics: impl Fn(usize, usize, usize) -> f64, domain: Domain) -> Vec<Transition> {
    let total = 4000.0;
    let mut out = Vec::new();
    for s in 0..NS {
        for a in 0..NA {
            for s2 in 0..NS {
                let n = (total * p_sa[s][a] * dynamics(s, a, s2)).round() as usize;
                let t = transition(one_hot(s, NS), one_hot(a, NA), one_hot(s2, NS), domain);
                out.extend(std::iter::repeat_n(t, n));
            }
        }
    }
    out
}

fn source_dynamics(s: usize, a: usize, s2: usize) -> f64 {
    if s2 == (s + a) % NS { 0.6 } else { 0.2 }
}

fn target_dynamics(s: usize, a: usize, s2: usize) -> f64 {
    if s2 == (s + 2 * a + 1) % NS { 0.5 } else { 0.25 }
}

#[test]
fn tabular_classifiers_recover_the_dynamics_ratio() {
    // Different (s, a) marginals in the two domains; q_sa must cancel them.
    let p_src = [[0.3, 0.1], [0.2, 0.1], [0.2, 0.1]];
    let p_tgt = [[0.1, 0.2], [0.1, 0.3], [0.15, 0.15]];
    let src = tabular(&p_src, source_dynamics, Domain::Source);
    let tgt = tabular(&p_tgt, target_dynamics, Domain::Target);
    let cfg = DDConfig {
        alpha: 1.0,
        dd_clip: None,
        noise_std: 0.0,
        lr: 0.05,
        arch: MlpConfig::new(vec![], Activation::Tanh),
        features: FeatureMap::Outer,
        ..DDConfig::default()
    };
    let mut pair = ClassifierPair::new(NS, NA, cfg, 3).unwrap();
    let mut r = rng::stream(3, 0);
    for _ in 0..1500 {
        pair.train_step(&src, &tgt, &mut r).unwrap();
    }
    for s in 0..NS {
        for a in 0..NA {
            for s2 in 0..NS {
                let est = pair.dd_value(&one_hot(s, NS), &one_hot(a, NA), &one_hot(s2, NS)).unwrap();
                let truth = (target_dynamics(s, a, s2) / source_dynamics(s, a, s2)).ln();
                assert!((est - truth).abs() < 0.05, "({s},{a},{s2}): {est} vs {truth}");
            }
        }
    }
}
