//! Two domain classifiers estimate log p_tgt(s'|s,a) - log p_src(s'|s,a) for
//! 1-D dynamics s' ~ N(s + a + μ, 0.5²) with μ = 0 (source) and 0.3 (target).
//! The exact value is 1.2 (s' - s - a) - 0.18.
//!
//! cargo run --release --example dynamics_difference

use odirl::dd::{ClassifierPair, DDConfig};
use odirl::env::{Domain, Transition};
use odirl::rng::{self, Rng64};
use rand::Rng;

fn sample(mu: f64, domain: Domain, n: usize, r: &mut Rng64) -> Vec<Transition> {
    (0..n)
        .map(|_| {
            let s: f64 = r.random_range(-1.0..1.0);
            let a: f64 = r.random_range(-1.0..1.0);
            let s2 = s + a + mu + 0.5 * rng::normal(r);
            Transition::new(vec![s], vec![a], vec![s2], false, domain, 0.0)
        })
        .collect()
}

fn main() -> odirl::Result<()> {
    let mut r = rng::stream(0, 0);
    let cfg = DDConfig {
        alpha: 1.0,
        noise_std: 0.0,
        lr: 1e-3,
        batch_size: 128,
        ..DDConfig::default()
    };
    let mut pair = ClassifierPair::new(1, 1, cfg, 0)?;
    for step in 1..=2000 {
        let src = sample(0.0, Domain::Source, 128, &mut r);
        let tgt = sample(0.3, Domain::Target, 128, &mut r);
        let loss = pair.train_step(&src, &tgt, &mut r)?;
        if step % 500 == 0 {
            println!("step {step}: loss {:.4}, sas accuracy {:.3}", loss.total(), loss.accuracy_sas);
        }
    }
    println!("  s'-s-a   estimate   exact");
    for d in [-0.5, -0.2, 0.0, 0.15, 0.3, 0.5, 0.8] {
        let est = pair.dd_value(&[0.2], &[-0.1], &[0.1 + d])?;
        println!("  {d:+.2}    {est:+.4}   {:+.4}", 1.2 * d - 0.18);
    }
    Ok(())
}
