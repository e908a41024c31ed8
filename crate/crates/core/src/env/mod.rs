//! Paired source/target simulators.
//!
//! Both members of a [`DomainPair`] share state space, action space and
//! initial-state distribution; only their transition functions differ.
//! Environments are stateless: the caller owns the state vector and passes it
//! to [`Environment::step`].

mod link_chain;
mod point_maze;
mod transitions_csv;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::rng::Rng64;

pub use link_chain::{GroundTruth, LinkChain, LinkChainConfig};
pub use point_maze::{PointMaze, PointMazeConfig, Rect};
pub use transitions_csv::{read_transitions, write_transitions, TransitionRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Source,
    Target,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Source => "source",
            Domain::Target => "target",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "source" => Some(Domain::Source),
            "target" => Some(Domain::Target),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Domain::Source => Domain::Target,
            Domain::Target => Domain::Source,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvSpec {
    pub state_dim: usize,
    pub action_dim: usize,
    pub action_low: Vec<f64>,
    pub action_high: Vec<f64>,
    pub horizon: usize,
    /// Goal point in the space returned by [`Environment::position`].
    pub goal: Vec<f64>,
}

impl EnvSpec {
    pub fn clip_action(&self, action: &[f64]) -> Vec<f64> {
        action
            .iter()
            .zip(self.action_low.iter().zip(&self.action_high))
            .map(|(a, (lo, hi))| a.clamp(*lo, *hi))
            .collect()
    }

    /// Same state space, action space and horizon.
    pub fn compatible_with(&self, other: &EnvSpec) -> bool {
        self.state_dim == other.state_dim
            && self.action_dim == other.action_dim
            && self.action_low == other.action_low
            && self.action_high == other.action_high
            && self.horizon == other.horizon
            && self.goal == other.goal
    }
}

/// One environment step.
///
/// `a` is the action as executed, i.e. clipped to bounds. The ground-truth reward is only reachable through
/// [`Transition::evaluation_reward`], which no learning code calls.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub s_next: Vec<f64>,
    pub done: bool,
    pub domain: Domain,
    gt_reward: f64,
}

impl Transition {
    pub fn new(
        s: Vec<f64>,
        a: Vec<f64>,
        s_next: Vec<f64>,
        done: bool,
        domain: Domain,
        gt_reward: f64,
    ) -> Self {
        Self {
            s,
            a,
            s_next,
            done,
            domain,
            gt_reward,
        }
    }

    /// Ground-truth reward of this step, for scoring only.
    pub fn evaluation_reward(&self) -> f64 {
        self.gt_reward
    }

    /// Same transition with its recorded fields but without a ground-truth
    /// reward (as read back from a demonstration file).
    pub fn without_evaluation_reward(mut self) -> Self {
        self.gt_reward = f64::NAN;
        self
    }

    /// Equality of the persisted fields (everything but the evaluation reward).
    pub fn same_record(&self, other: &Transition) -> bool {
        fn bits(a: &[f64], b: &[f64]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
        }
        bits(&self.s, &other.s)
            && bits(&self.a, &other.a)
            && bits(&self.s_next, &other.s_next)
            && self.done == other.done
            && self.domain == other.domain
    }
}

pub type Trajectory = Vec<Transition>;

/// `-‖position - goal‖₂`.
pub fn ground_truth_reward(goal: &[f64], position: &[f64]) -> f64 {
    -goal
        .iter()
        .zip(position)
        .map(|(g, p)| (g - p) * (g - p))
        .sum::<f64>()
        .sqrt()
}

pub trait Environment {
    fn spec(&self) -> &EnvSpec;

    fn domain(&self) -> Domain;

    /// Samples from the initial-state distribution. Both members of a
    /// domain pair consume the generator identically.
    fn reset(&self, rng: &mut Rng64) -> Vec<f64>;

    /// Advances `state` under `action` (clipped to bounds). Returns the next
    /// state and whether the episode terminated.
    fn step(&self, state: &[f64], action: &[f64], rng: &mut Rng64) -> Result<(Vec<f64>, bool)>;

    /// The task-space point used for goal distance.
    fn position(&self, state: &[f64]) -> Vec<f64>;

    fn ground_truth_reward(&self, state: &[f64]) -> f64 {
        ground_truth_reward(&self.spec().goal, &self.position(state))
    }

    fn is_success(&self, state: &[f64]) -> bool;
}

/// Anything that maps a state to an action.
pub trait Actor {
    fn act(&self, state: &[f64], rng: &mut Rng64) -> Result<Vec<f64>>;
}

/// Wraps a closure as a state-feedback controller.
pub struct Scripted<F>(pub F);

impl<F: Fn(&[f64]) -> Vec<f64>> Actor for Scripted<F> {
    fn act(&self, state: &[f64], _rng: &mut Rng64) -> Result<Vec<f64>> {
        Ok((self.0)(state))
    }
}

/// Runs `actor` for at most `horizon` steps from a fresh reset.
///
/// Every transition is tagged with the environment's domain and the episode
/// stops early on termination.
pub fn rollout<A, E>(actor: &A, env: &E, horizon: usize, rng: &mut Rng64) -> Result<Trajectory>
where
    A: Actor + ?Sized,
    E: Environment + ?Sized,
{
    let mut traj = Vec::with_capacity(horizon);
    if horizon == 0 {
        return Ok(traj);
    }
    let mut state = env.reset(rng);
    for _ in 0..horizon {
        let raw = actor.act(&state, rng)?;
        if raw.len() != env.spec().action_dim {
            return Err(Error::DimensionMismatch {
                context: "action",
                expected: env.spec().action_dim,
                got: raw.len(),
            });
        }
        ensure_finite(&raw, "action")?;
        let action = env.spec().clip_action(&raw);
        let (next, done) = env.step(&state, &action, rng)?;
        let gt = env.ground_truth_reward(&next);
        traj.push(Transition::new(
            std::mem::replace(&mut state, next.clone()),
            action,
            next,
            done,
            env.domain(),
            gt,
        ));
        if done {
            break;
        }
    }
    Ok(traj)
}

/// Source and target instances of the same task.
#[derive(Clone, Debug)]
pub struct DomainPair<E> {
    pub source: E,
    pub target: E,
}

impl<E: Environment> DomainPair<E> {
    pub fn new(source: E, target: E) -> Result<Self> {
        if source.domain() != Domain::Source || target.domain() != Domain::Target {
            return Err(Error::Config("domain pair members carry the wrong tags".into()));
        }
        if !source.spec().compatible_with(target.spec()) {
            return Err(Error::Config(
                "source and target must share state/action spaces and horizon".into(),
            ));
        }
        Ok(Self { source, target })
    }

    pub fn get(&self, domain: Domain) -> &E {
        match domain {
            Domain::Source => &self.source,
            Domain::Target => &self.target,
        }
    }

    pub fn spec(&self) -> &EnvSpec {
        self.target.spec()
    }
}

/// The concrete simulators shipped with the crate.
#[derive(Clone, Debug)]
pub enum Env {
    PointMaze(PointMaze),
    LinkChain(LinkChain),
}

impl Environment for Env {
    fn spec(&self) -> &EnvSpec {
        match self {
            Env::PointMaze(e) => e.spec(),
            Env::LinkChain(e) => e.spec(),
        }
    }

    fn domain(&self) -> Domain {
        match self {
            Env::PointMaze(e) => e.domain(),
            Env::LinkChain(e) => e.domain(),
        }
    }

    fn reset(&self, rng: &mut Rng64) -> Vec<f64> {
        match self {
            Env::PointMaze(e) => e.reset(rng),
            Env::LinkChain(e) => e.reset(rng),
        }
    }

    fn step(&self, state: &[f64], action: &[f64], rng: &mut Rng64) -> Result<(Vec<f64>, bool)> {
        match self {
            Env::PointMaze(e) => e.step(state, action, rng),
            Env::LinkChain(e) => e.step(state, action, rng),
        }
    }

    fn position(&self, state: &[f64]) -> Vec<f64> {
        match self {
            Env::PointMaze(e) => e.position(state),
            Env::LinkChain(e) => e.position(state),
        }
    }

    fn ground_truth_reward(&self, state: &[f64]) -> f64 {
        match self {
            Env::PointMaze(e) => e.ground_truth_reward(state),
            Env::LinkChain(e) => e.ground_truth_reward(state),
        }
    }

    fn is_success(&self, state: &[f64]) -> bool {
        match self {
            Env::PointMaze(e) => e.is_success(state),
            Env::LinkChain(e) => e.is_success(state),
        }
    }
}

impl Env {
    pub fn as_point_maze(&self) -> Option<&PointMaze> {
        match self {
            Env::PointMaze(e) => Some(e),
            Env::LinkChain(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn ground_truth_is_negative_distance() {
        assert_eq!(ground_truth_reward(&[0.3, 0.4], &[0.3, 0.4]), 0.0);
        assert_eq!(ground_truth_reward(&[0.0, 1.0], &[0.0, 0.0]), -1.0);
        let goal = [0.5, 0.5];
        assert!(ground_truth_reward(&goal, &[0.5, 0.6]) > ground_truth_reward(&goal, &[0.5, 0.7]));
    }

    #[test]
    fn zero_horizon_rollout_is_empty() {
        let pair = PointMazeConfig::default().domain_pair().unwrap();
        let mut r = rng::from_seed(0);
        let t = rollout(&Scripted(|_: &[f64]| vec![0.0, 0.0]), &pair.source, 0, &mut r).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn rollout_tags_and_terminates() {
        let pair = PointMazeConfig::default().domain_pair().unwrap();
        let mut r = rng::from_seed(0);
        let env = &pair.target;
        let t = rollout(&Scripted(|_: &[f64]| vec![0.0, 0.0]), env, 7, &mut r).unwrap();
        assert_eq!(t.len(), 7);
        assert!(t.iter().all(|tr| tr.domain == Domain::Target && !tr.done));
    }

    #[test]
    fn rollout_rejects_bad_actions() {
        let pair = PointMazeConfig::default().domain_pair().unwrap();
        let mut r = rng::from_seed(0);
        let bad = Scripted(|_: &[f64]| vec![f64::NAN, 0.0]);
        assert!(rollout(&bad, &pair.source, 3, &mut r).is_err());
        let short = Scripted(|_: &[f64]| vec![0.0]);
        assert!(rollout(&short, &pair.source, 3, &mut r).is_err());
    }
}
