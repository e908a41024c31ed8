use serde::{Deserialize, Serialize};

use super::GaussianPolicy;
use crate::env::{rollout, Actor, Environment, Trajectory};
use crate::error::{Error, Result};
use crate::rng::Rng64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Mean cumulative ground-truth reward per episode.
    pub mean_return: f64,
    /// Fraction of episodes whose final state is a success state.
    pub success_rate: f64,
    pub episodes: usize,
}

/// Scores any actor by ground-truth return over `n_episodes` rollouts.
pub fn evaluate_actor<A, E>(actor: &A, env: &E, n_episodes: usize, rng: &mut Rng64) -> Result<(EvalResult, Vec<Trajectory>)>
where
    A: Actor + ?Sized,
    E: Environment + ?Sized,
{
    if n_episodes == 0 {
        return Err(Error::Config("evaluation needs at least one episode".into()));
    }
    let horizon = env.spec().horizon;
    let mut total = 0.0;
    let mut successes = 0usize;
    let mut trajs = Vec::with_capacity(n_episodes);
    for _ in 0..n_episodes {
        let traj = rollout(actor, env, horizon, rng)?;
        total += traj.iter().map(|t| t.evaluation_reward()).sum::<f64>();
        if traj.last().is_some_and(|t| env.is_success(&t.s_next)) {
            successes += 1;
        }
        trajs.push(traj);
    }
    let n = n_episodes as f64;
    Ok((
        EvalResult {
            mean_return: total / n,
            success_rate: successes as f64 / n,
            episodes: n_episodes,
        },
        trajs,
    ))
}

/// Deterministic-mode (mean action) evaluation of `policy`.
pub fn evaluate<E: Environment + ?Sized>(
    policy: &GaussianPolicy,
    env: &E,
    n_episodes: usize,
    rng: &mut Rng64,
) -> Result<EvalResult> {
    Ok(evaluate_actor(&policy.deterministic(), env, n_episodes, rng)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::MlpConfig;
    use crate::env::{Domain, PointMazeConfig, Scripted};
    use crate::rng;

    fn open_maze() -> crate::env::PointMaze {
        // A wall too short to matter for a start/goal band below it.
        let cfg = PointMazeConfig {
            source_wall_length: 0.05,
            target_wall_length: 0.1,
            ..PointMazeConfig::default()
        };
        cfg.build(Domain::Source).unwrap()
    }

    #[test]
    fn standing_still_never_succeeds() {
        let env = open_maze();
        let still = Scripted(|_: &[f64]| vec![0.0, 0.0]);
        let (res, _) = evaluate_actor(&still, &env, 5, &mut rng::from_seed(0)).unwrap();
        assert_eq!(res.success_rate, 0.0);
    }

    #[test]
    fn scripted_path_beats_random_policy() {
        let cfg = PointMazeConfig::default();
        let env = cfg.build(Domain::Source).unwrap();
        let goal = env.spec().goal.clone();
        let wall = cfg.wall_rect(cfg.source_wall_length);
        // Go under the wall, then up to the goal.
        let below = wall.min[1] - 0.06;
        let scripted = Scripted(move |s: &[f64]| {
            let waypoint = if s[0] < wall.max[0] + 0.03 && s[1] > below {
                [s[0].max(wall.min[0] - 0.05), below - 0.02]
            } else if s[0] < wall.max[0] + 0.05 {
                [wall.max[0] + 0.08, below - 0.02]
            } else {
                [goal[0], goal[1]]
            };
            vec![(waypoint[0] - s[0]) * 10.0, (waypoint[1] - s[1]) * 10.0]
        });
        let (scripted_res, _) = evaluate_actor(&scripted, &env, 20, &mut rng::from_seed(1)).unwrap();
        assert_eq!(scripted_res.success_rate, 1.0);

        let random = GaussianPolicy::new(env.spec(), &MlpConfig::default(), 0.0, 3);
        let (random_res, _) = evaluate_actor(&random, &env, 20, &mut rng::from_seed(2)).unwrap();
        assert!(scripted_res.mean_return > random_res.mean_return);
    }

    #[test]
    fn zero_episodes_is_an_error() {
        let env = open_maze();
        let p = GaussianPolicy::new(env.spec(), &MlpConfig::default(), 0.0, 3);
        assert!(evaluate(&p, &env, 0, &mut rng::from_seed(0)).is_err());
    }
}
