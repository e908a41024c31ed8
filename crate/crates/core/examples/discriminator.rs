//! The shaped discriminator on a tabular problem: at the optimum
//! D/(1-D) = ρ_expert(s,a) / ρ_policy(s,a), and shifting the potential h by
//! a constant leaves every undiscounted logit unchanged.
//!
//! cargo run --release --example discriminator

use odirl::approx::{Activation, FeatureMap, MlpConfig};
use odirl::env::{Domain, Transition};
use odirl::irl::{AirlDiscriminator, DiscConfig, DiscSample, RewardInput};

fn one_hot(i: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn main() -> odirl::Result<()> {
    // Occupancies over 2 states x 2 actions and the learner's log π.
    let rho_expert = [[0.4, 0.1], [0.2, 0.3]];
    let rho_policy = [[0.25, 0.25], [0.25, 0.25]];
    let log_pi = 0.5f64.ln();
    let cfg = DiscConfig {
        arch: MlpConfig::new(vec![], Activation::Tanh),
        reward_input: RewardInput::StateAction,
        features: FeatureMap::Outer,
        gamma: 1.0,
        lr: 0.05,
        ..DiscConfig::default()
    };
    let mut disc = AirlDiscriminator::new(2, 2, cfg, 0)?;
    let build = |rho: &[[f64; 2]; 2], domain| -> Vec<Transition> {
        let mut out = Vec::new();
        for s in 0..2 {
            for a in 0..2 {
                let t = Transition::new(one_hot(s, 2), one_hot(a, 2), one_hot(s, 2), false, domain, 0.0);
                out.extend(std::iter::repeat_n(t, (rho[s][a] * 1000.0) as usize));
            }
        }
        out
    };
    let demo_t = build(&rho_expert, Domain::Source);
    let pol_t = build(&rho_policy, Domain::Target);
    let demos: Vec<DiscSample> = demo_t.iter().map(|t| DiscSample::new(t, log_pi)).collect();
    let pols: Vec<DiscSample> = pol_t.iter().map(|t| DiscSample::new(t, log_pi)).collect();
    for _ in 0..1500 {
        disc.update(&demos, &pols)?;
    }
    let mut shifted = disc.clone();
    shifted.shift_h(7.3);
    println!("(s,a)   D/(1-D)   occupancy ratio   logit change after h += 7.3");
    for s in 0..2 {
        for a in 0..2 {
            let t = Transition::new(one_hot(s, 2), one_hot(a, 2), one_hot(s, 2), false, Domain::Target, 0.0);
            let x = DiscSample::new(&t, log_pi);
            let logit = disc.logit(&x)?;
            println!(
                "({s},{a})   {:.4}    {:.4}            {:.1e}",
                logit.exp(),
                rho_expert[s][a] / rho_policy[s][a],
                shifted.logit(&x)? - logit
            );
        }
    }
    Ok(())
}
