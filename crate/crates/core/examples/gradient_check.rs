//! Analytic backprop against central differences for a small network.
//!
//! cargo run --release --example gradient_check

use odirl::approx::{Activation, MlpConfig};
use odirl::rng;
use rand::Rng;

fn main() -> odirl::Result<()> {
    let mut r = rng::stream(7, 0);
    let eps = 1e-5;
    for act in [Activation::Tanh, Activation::Relu] {
        let mut net = MlpConfig::new(vec![16, 16], act).build(5, 3, 1);
        let x: Vec<f64> = (0..5).map(|_| r.random_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        net.zero_grad();
        net.forward_cached(&x)?;
        net.backward(&x, &u)?;
        let analytic = net.grad().to_vec();
        let mut worst: f64 = 0.0;
        for i in 0..analytic.len() {
            let eval = |d: f64| -> f64 {
                let mut p = net.clone();
                p.params_mut()[i] += d;
                p.forward(&x).unwrap().iter().zip(&u).map(|(o, w)| o * w).sum()
            };
            let numeric = (eval(eps) - eval(-eps)) / (2.0 * eps);
            let scale = analytic[i].abs().max(numeric.abs());
            if scale > 1e-6 {
                worst = worst.max((analytic[i] - numeric).abs() / scale);
            }
        }
        println!("{act:?}: {} parameters, worst relative error {worst:.2e}", analytic.len());
    }
    Ok(())
}
