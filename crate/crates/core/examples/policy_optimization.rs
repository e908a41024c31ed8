//! The clipped-ratio, entropy-regularised optimizer on a one-step bandit
//! with reward -(a - 0.5)². Larger entropy coefficients keep the policy
//! wider.
//!
//! cargo run --release --example policy_optimization

use odirl::env::{Domain, EnvSpec, Transition};
use odirl::policy::{MaxEntLearner, PolicyOptConfig};
use odirl::rng;

fn main() -> odirl::Result<()> {
    let spec = EnvSpec {
        state_dim: 1,
        action_dim: 1,
        action_low: vec![-1.0],
        action_high: vec![1.0],
        horizon: 1,
        goal: vec![0.0],
    };
    for lambda in [0.0, 0.05, 0.5] {
        let cfg = PolicyOptConfig {
            entropy_coef: lambda,
            lr: 3e-3,
            ..PolicyOptConfig::default()
        };
        let mut learner = MaxEntLearner::new(&spec, cfg, 0)?;
        let mut r = rng::stream(0, 1);
        for _ in 0..300 {
            let mut batch = Vec::new();
            for _ in 0..64 {
                let a = learner.policy.sample_action(&[0.0], &mut r)?.action;
                batch.push(vec![Transition::new(vec![0.0], a, vec![0.0], true, Domain::Target, 0.0)]);
            }
            learner.update_with(&batch, |_, t| Ok(-(t.a[0] - 0.5).powi(2)), &mut r)?;
        }
        let mode = learner.policy.squash(&learner.policy.mean(&[0.0])?)[0];
        println!("lambda {lambda:<4}: mode {mode:.3}, entropy {:.3}", learner.policy.entropy());
    }
    Ok(())
}
