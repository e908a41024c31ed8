//! Behavioural checks of the entropy-regularised policy optimizer on
//! one-step bandits.

use odirl::env::{Domain, EnvSpec, Transition};
use odirl::policy::{MaxEntLearner, PolicyOptConfig};
use odirl::rng::{self, Rng64};

fn bandit_spec() -> EnvSpec {
    EnvSpec {
        state_dim: 1,
        action_dim: 1,
        action_low: vec![-1.0],
        action_high: vec![1.0],
        horizon: 1,
        goal: vec![0.0],
    }
}

fn pull(learner: &MaxEntLearner, n: usize, rng: &mut Rng64) -> Vec<Vec<Transition>> {
    (0..n)
        .map(|_| {
            let a = learner.policy.sample_action(&[0.0], rng).unwrap().action;
            vec![Transition::new(vec![0.0], a, vec![0.0], true, Domain::Target, 0.0)]
        })
        .collect()
}

/// Trains on `r(a) = -(a - 0.5)²` and returns the learner.
fn quadratic_bandit(entropy_coef: f64, iterations: usize, seed: u64) -> MaxEntLearner {
    let cfg = PolicyOptConfig {
        entropy_coef,
        lr: 3e-3,
        ..PolicyOptConfig::default()
    };
    let mut learner = MaxEntLearner::new(&bandit_spec(), cfg, seed).unwrap();
    let mut rng = rng::stream(seed, 1);
    for _ in 0..iterations {
        let batch = pull(&learner, 64, &mut rng);
        learner
            .update_with(&batch, |_, t| Ok(-(t.a[0] - 0.5).powi(2)), &mut rng)
            .unwrap();
    }
    learner
}

#[test]
fn bandit_mean_converges_to_optimum() {
    let learner = quadratic_bandit(0.0, 300, 4);
    let mode = learner.policy.squash(&learner.policy.mean(&[0.0]).unwrap())[0];
    let mut rng = rng::stream(4, 2);
    let sampled: f64 = pull(&learner, 2000, &mut rng).iter().map(|t| t[0].a[0]).sum::<f64>() / 2000.0;
    assert!((mode - 0.5).abs() <= 0.05, "deterministic action {mode}, log std {:?}", learner.policy.log_std());
    assert!((sampled - 0.5).abs() <= 0.05, "mean sampled action {sampled}");
}

#[test]
fn plain_policy_gradient_moves_towards_reward() {
    // Unclipped, single epoch, raw advantages: one step is plain REINFORCE.
    let cfg = PolicyOptConfig {
        clip_ratio: f64::INFINITY,
        epochs: 1,
        minibatch_size: 1024,
        normalize_advantages: false,
        ..PolicyOptConfig::default()
    };
    for (sign, seed) in [(1.0, 1), (-1.0, 2)] {
        let mut learner = MaxEntLearner::new(&bandit_spec(), cfg.clone(), seed).unwrap();
        let mut rng = rng::stream(seed, 1);
        let before = learner.policy.mean(&[0.0]).unwrap()[0];
        let batch = pull(&learner, 512, &mut rng);
        learner.update_with(&batch, |_, t| Ok(sign * t.a[0]), &mut rng).unwrap();
        let after = learner.policy.mean(&[0.0]).unwrap()[0];
        assert!(sign * (after - before) > 0.0, "sign {sign}: mean {before} -> {after}");
    }
}

#[test]
fn entropy_increases_with_coefficient() {
    let entropies: Vec<f64> = [0.0, 0.05, 0.5].iter().map(|&c| quadratic_bandit(c, 60, 7).policy.entropy()).collect();
    assert!(entropies.windows(2).all(|w| w[0] < w[1]), "{entropies:?}");
}
