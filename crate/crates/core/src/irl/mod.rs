//! Adversarial reward learning: the shaped AIRL discriminator (optionally
//! with a dynamics-difference offset on expert logits), a GAIL baseline and
//! reward heatmaps.

mod airl;
mod gail;

use serde::{Deserialize, Serialize};

use crate::approx::log_sigmoid;
use crate::env::Transition;

pub use airl::{write_heatmap, AirlDiscriminator, DiscConfig, HeatmapCell};
pub use gail::GailDiscriminator;

/// All sigmoid/log computations clamp logits to `±LOGIT_CLAMP`.
pub const LOGIT_CLAMP: f64 = 10.0;

/// What the disentangled reward term `g` sees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardInput {
    #[default]
    StateOnly,
    StateAction,
}

/// One discriminator input: a transition, the current policy's
/// `log π(a|s)` on it and the dynamics-difference offset (zero for policy
/// samples and for plain AIRL).
#[derive(Clone, Copy, Debug)]
pub struct DiscSample<'a> {
    pub transition: &'a Transition,
    pub log_pi: f64,
    pub dd: f64,
}

impl<'a> DiscSample<'a> {
    pub fn new(transition: &'a Transition, log_pi: f64) -> Self {
        Self {
            transition,
            log_pi,
            dd: 0.0,
        }
    }

    pub fn with_dd(mut self, dd: f64) -> Self {
        self.dd = dd;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiscStats {
    pub loss: f64,
    /// Fraction of demo samples with `D > 0.5`.
    pub demo_accuracy: f64,
    /// Fraction of policy samples with `D < 0.5`.
    pub policy_accuracy: f64,
}

/// `(f + dd) - log π`.
pub fn disc_logit(f_val: f64, log_pi: f64, dd_val: f64) -> f64 {
    (f_val + dd_val) - log_pi
}

pub fn clamp_logit(logit: f64) -> f64 {
    logit.clamp(-LOGIT_CLAMP, LOGIT_CLAMP)
}

/// `D = σ(clamp(logit))`.
pub fn disc_prob(logit: f64) -> f64 {
    crate::approx::sigmoid(clamp_logit(logit))
}

/// Generator reward `f - log π = log D - log(1 - D)`; `flip` negates it
/// (the `log(1-D) - log D` reading).
pub fn policy_reward(f_val: f64, log_pi: f64, flip: bool) -> f64 {
    let r = f_val - log_pi;
    if flip {
        -r
    } else {
        r
    }
}

/// `log D - log(1 - D)` computed from a logit through the clamped sigmoid.
pub fn reward_from_logit(logit: f64) -> f64 {
    let l = clamp_logit(logit);
    log_sigmoid(l) - log_sigmoid(-l)
}

/// Logistic loss terms on a clamped logit. Returns `(loss, dloss/dlogit)`
/// for a positive (`demo = true`) or negative example. The derivative is
/// zero where the clamp is active.
pub(crate) fn logistic_term(logit: f64, demo: bool) -> (f64, f64) {
    let l = clamp_logit(logit);
    let active = logit.abs() < LOGIT_CLAMP;
    let p = crate::approx::sigmoid(l);
    if demo {
        (-log_sigmoid(l), if active { p - 1.0 } else { 0.0 })
    } else {
        (-log_sigmoid(-l), if active { p } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn logit_examples() {
        assert_eq!(disc_logit(0.0, 0.0, 0.0), 0.0);
        assert_eq!(disc_prob(0.0), 0.5);
        assert!((disc_prob(disc_logit(3f64.ln(), 0.0, 0.0)) - 0.75).abs() < 1e-15);
        assert!((disc_prob(disc_logit(0.0, 0.0, 3f64.ln())) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn reward_examples() {
        assert_eq!(policy_reward(0.4, 0.4, false), 0.0);
        assert!((policy_reward(3f64.ln(), 0.0, false) - 1.0986122886681098).abs() < 1e-15);
        assert_eq!(policy_reward(1.0, 0.25, true), -0.75);
    }

    proptest! {
        #[test]
        fn reward_from_logit_is_identity_inside_clamp(x in -9.9f64..9.9) {
            prop_assert!((reward_from_logit(x) - x).abs() < 1e-9);
        }

        #[test]
        fn logit_space_matches_ratio_form(f in -15.0f64..15.0, lp in -15.0f64..15.0) {
            // σ(f - log π) = e^f / (e^f + π)
            let logit = disc_logit(f, lp, 0.0);
            prop_assume!(logit.abs() <= 30.0);
            let ratio = f.exp() / (f.exp() + lp.exp());
            prop_assert!((crate::approx::sigmoid(logit) - ratio).abs() < 1e-12);
            if logit.abs() <= LOGIT_CLAMP {
                prop_assert_eq!(disc_prob(logit), crate::approx::sigmoid(logit));
            }
        }
    }
}
