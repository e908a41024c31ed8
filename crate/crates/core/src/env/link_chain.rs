use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Domain, DomainPair, Env, EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::rng::{self, Rng64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruth {
    /// Negative end-effector distance to the goal point.
    GoalDistance,
    /// Horizontal end-effector velocity ("run forward").
    ForwardVelocity,
}

/// Planar chain of torque-driven revolute joints with a fixed base.
///
/// State is `[θ_0..θ_{n-1}, ω_0..ω_{n-1}]`. Each joint integrates
/// `ω' = ω + dt (τ - damping ω) + noise`, `θ' = θ + dt ω'` with torque
/// `τ = torque_limit · clip(a)`; disabled joints receive zero torque.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkChainConfig {
    pub num_joints: usize,
    pub torque_limit: f64,
    /// Actuators removed in the target domain (true = zero torque).
    pub target_disabled: Vec<bool>,
    pub dt: f64,
    pub damping: f64,
    pub goal: [f64; 2],
    pub goal_radius: f64,
    /// Std of Gaussian noise on the joint velocities per step.
    pub noise_std: f64,
    /// Half-width of the uniform initial range for angles and velocities.
    pub init_range: f64,
    pub horizon: usize,
    pub ground_truth: GroundTruth,
}

impl Default for LinkChainConfig {
    fn default() -> Self {
        Self {
            num_joints: 3,
            torque_limit: 4.0,
            target_disabled: vec![true, false, false],
            dt: 0.1,
            damping: 2.0,
            goal: [0.1, 0.6],
            goal_radius: 0.1,
            noise_std: 0.01,
            init_range: 0.05,
            horizon: 40,
            ground_truth: GroundTruth::GoalDistance,
        }
    }
}

impl LinkChainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("linkchain: {m}")));
        if self.num_joints == 0 {
            return bad("num_joints must be positive");
        }
        if self.target_disabled.len() != self.num_joints {
            return bad("target_disabled must have one entry per joint");
        }
        if !self.target_disabled.iter().any(|&d| d) {
            return bad("target domain must disable at least one actuator");
        }
        if !(self.torque_limit > 0.0 && self.dt > 0.0 && self.damping >= 0.0) {
            return bad("torque_limit and dt must be positive, damping non-negative");
        }
        if !(self.noise_std >= 0.0 && self.init_range >= 0.0 && self.goal_radius > 0.0) {
            return bad("noise_std and init_range must be non-negative, goal_radius positive");
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        Ok(())
    }

    pub fn build(&self, domain: Domain) -> Result<LinkChain> {
        self.validate()?;
        let n = self.num_joints;
        let disabled = match domain {
            Domain::Source => vec![false; n],
            Domain::Target => self.target_disabled.clone(),
        };
        Ok(LinkChain {
            spec: EnvSpec {
                state_dim: 2 * n,
                action_dim: n,
                action_low: vec![-1.0; n],
                action_high: vec![1.0; n],
                horizon: self.horizon,
                goal: self.goal.to_vec(),
            },
            domain,
            disabled,
            config: self.clone(),
        })
    }

    pub fn domain_pair(&self) -> Result<DomainPair<Env>> {
        DomainPair::new(
            Env::LinkChain(self.build(Domain::Source)?),
            Env::LinkChain(self.build(Domain::Target)?),
        )
    }
}

#[derive(Clone, Debug)]
pub struct LinkChain {
    spec: EnvSpec,
    domain: Domain,
    disabled: Vec<bool>,
    config: LinkChainConfig,
}

impl LinkChain {
    pub fn disabled_mask(&self) -> &[bool] {
        &self.disabled
    }

    pub fn config(&self) -> &LinkChainConfig {
        &self.config
    }

    fn link_length(&self) -> f64 {
        1.0 / self.config.num_joints as f64
    }

    /// End-effector position by forward kinematics.
    pub fn end_effector(&self, state: &[f64]) -> [f64; 2] {
        let l = self.link_length();
        let mut phi = 0.0;
        let mut p = [0.0, 0.0];
        for theta in &state[..self.config.num_joints] {
            phi += theta;
            p[0] += l * phi.cos();
            p[1] += l * phi.sin();
        }
        p
    }

    /// Horizontal end-effector velocity.
    pub fn forward_velocity(&self, state: &[f64]) -> f64 {
        let n = self.config.num_joints;
        let l = self.link_length();
        let (mut phi, mut phi_dot, mut vx) = (0.0, 0.0, 0.0);
        for k in 0..n {
            phi += state[k];
            phi_dot += state[n + k];
            vx -= l * phi.sin() * phi_dot;
        }
        vx
    }
}

impl Environment for LinkChain {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn reset(&self, rng: &mut Rng64) -> Vec<f64> {
        let w = self.config.init_range;
        (0..self.spec.state_dim)
            .map(|_| if w > 0.0 { rng.random_range(-w..=w) } else { 0.0 })
            .collect()
    }

    fn step(&self, state: &[f64], action: &[f64], rng: &mut Rng64) -> Result<(Vec<f64>, bool)> {
        let n = self.config.num_joints;
        if state.len() != 2 * n || action.len() != n {
            return Err(Error::DimensionMismatch {
                context: "linkchain step",
                expected: if state.len() != 2 * n { 2 * n } else { n },
                got: if state.len() != 2 * n { state.len() } else { action.len() },
            });
        }
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence("non-finite linkchain state".into()));
        }
        crate::error::ensure_finite(action, "linkchain action")?;
        let a = self.spec.clip_action(action);
        let c = &self.config;
        let mut next = vec![0.0; 2 * n];
        for k in 0..n {
            let torque = if self.disabled[k] { 0.0 } else { c.torque_limit * a[k] };
            let noise = c.noise_std * rng::normal(rng);
            let omega = state[n + k] + c.dt * (torque - c.damping * state[n + k]) + noise;
            next[n + k] = omega;
            next[k] = state[k] + c.dt * omega;
        }
        if !next.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence("linkchain integration produced non-finite state".into()));
        }
        Ok((next, false))
    }

    fn position(&self, state: &[f64]) -> Vec<f64> {
        self.end_effector(state).to_vec()
    }

    fn ground_truth_reward(&self, state: &[f64]) -> f64 {
        match self.config.ground_truth {
            GroundTruth::GoalDistance => super::ground_truth_reward(&self.spec.goal, &self.position(state)),
            GroundTruth::ForwardVelocity => self.forward_velocity(state),
        }
    }

    fn is_success(&self, state: &[f64]) -> bool {
        -super::ground_truth_reward(&self.spec.goal, &self.position(state)) <= self.config.goal_radius
    }
}
