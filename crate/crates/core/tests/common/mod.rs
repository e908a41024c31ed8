//! Oracles shared by the integration test targets.
#![allow(dead_code)]

use odirl::approx::Mlp;
use odirl::env::{Domain, Transition};
use odirl::rng::{self, Rng64};
use rand::Rng;

/// Worst agreement between analytic and central-difference gradients.
#[derive(Debug, Default)]
pub struct GradReport {
    pub checked: usize,
    pub failures: usize,
    pub worst_rel: f64,
}

impl GradReport {
    pub fn merge(&mut self, other: GradReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        self.worst_rel = self.worst_rel.max(other.worst_rel);
    }
}

pub const FD_EPS: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-4;
pub const ABS_FLOOR: f64 = 1e-8;

/// Compares `analytic` with `numeric` under the relative tolerance. Pairs
/// closer than `ABS_FLOOR` (finite-difference round-off) also pass. The
/// returned relative error is reported for gradients above 1e-6 only.
pub fn grad_agrees(analytic: f64, numeric: f64) -> (bool, f64) {
    let diff = (analytic - numeric).abs();
    let scale = analytic.abs().max(numeric.abs());
    let rel = if scale > 0.0 { diff / scale } else { 0.0 };
    (diff <= ABS_FLOOR || rel <= REL_TOL, if scale > 1e-6 { rel } else { 0.0 })
}

/// Checks `d(u · net(x))/dθ` for `draws` random parameter sets, inputs and
/// upstream vectors. Each draw checks up to `per_draw` parameters, always
/// including the first and last.
pub fn check_mlp(template: &Mlp, draws: usize, per_draw: usize, rng: &mut Rng64) -> GradReport {
    let mut report = GradReport::default();
    for _ in 0..draws {
        let mut net = template.clone();
        for p in net.params_mut() {
            *p = rng.random_range(-0.8..0.8);
        }
        net.zero_grad();
        let x: Vec<f64> = (0..net.input_dim()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let u: Vec<f64> = (0..net.output_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        net.forward_cached(&x).unwrap();
        net.backward(&x, &u).unwrap();
        let analytic = net.grad().to_vec();
        let n = analytic.len();
        let mut idx: Vec<usize> = vec![0, n - 1];
        idx.extend((0..per_draw.saturating_sub(2)).map(|_| rng.random_range(0..n)));
        for i in idx {
            let eval = |delta: f64| {
                let mut probe = net.clone();
                probe.params_mut()[i] += delta;
                probe.forward(&x).unwrap().iter().zip(&u).map(|(o, w)| o * w).sum::<f64>()
            };
            let numeric = (eval(FD_EPS) - eval(-FD_EPS)) / (2.0 * FD_EPS);
            let (ok, rel) = grad_agrees(analytic[i], numeric);
            report.checked += 1;
            report.worst_rel = report.worst_rel.max(rel);
            if !ok {
                report.failures += 1;
            }
        }
    }
    report
}

pub fn transition(s: Vec<f64>, a: Vec<f64>, s_next: Vec<f64>, domain: Domain) -> Transition {
    Transition::new(s, a, s_next, false, domain, 0.0)
}

/// Two 1-D domains with `s' ~ N(s + a + μ_d, σ²)`, `s, a ~ U[-1, 1]`.
pub struct GaussianShift {
    pub mu_source: f64,
    pub mu_target: f64,
    pub sigma: f64,
}

impl GaussianShift {
    pub fn sample(&self, domain: Domain, n: usize, rng: &mut Rng64) -> Vec<Transition> {
        let mu = match domain {
            Domain::Source => self.mu_source,
            Domain::Target => self.mu_target,
        };
        (0..n)
            .map(|_| {
                let s: f64 = rng.random_range(-1.0..1.0);
                let a: f64 = rng.random_range(-1.0..1.0);
                let s_next = s + a + mu + self.sigma * rng::normal(rng);
                transition(vec![s], vec![a], vec![s_next], domain)
            })
            .collect()
    }

    /// `log N(s'; s+a+μ_t, σ) - log N(s'; s+a+μ_s, σ)`.
    pub fn log_ratio(&self, s: f64, a: f64, s_next: f64) -> f64 {
        let d = s_next - s - a;
        let var2 = 2.0 * self.sigma * self.sigma;
        ((d - self.mu_source).powi(2) - (d - self.mu_target).powi(2)) / var2
    }
}

/// One-hot vector of length `n`.
pub fn one_hot(i: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Rounds a distribution to integer counts out of `total`.
pub fn counts(p: &[f64], total: usize) -> Vec<usize> {
    p.iter().map(|q| (q * total as f64).round() as usize).collect()
}
