//! Paired source/target simulators: the same scripted controllers succeed in
//! the source domain and fail in the target domain.
//!
//! cargo run --release --example environments

use odirl::env::{rollout, Domain, Environment, LinkChainConfig, PointMazeConfig, Scripted};
use odirl::rng;

fn main() -> odirl::Result<()> {
    let maze = PointMazeConfig::default();
    let pair = maze.domain_pair()?;
    let goal = maze.goal_region.center();
    // Steer under the source wall's tip, then straight to the goal.
    let tip = 1.0 - maze.source_wall_length - 0.08;
    let controller = Scripted(move |s: &[f64]| {
        let aim = if s[0] < maze.wall_x + 0.05 && s[1] > tip { [maze.wall_x + 0.06, tip] } else { goal };
        vec![(aim[0] - s[0]) * 20.0, (aim[1] - s[1]) * 20.0]
    });
    println!("point maze, scripted detour under the source wall:");
    for domain in [Domain::Source, Domain::Target] {
        let env = pair.get(domain);
        let mut r = rng::stream(0, 0);
        let mut wins = 0;
        for _ in 0..20 {
            let traj = rollout(&controller, env, env.spec().horizon, &mut r)?;
            wins += usize::from(traj.last().is_some_and(|t| env.is_success(&t.s_next)));
        }
        println!("  {:6}: {wins}/20 episodes reach the goal", domain.as_str());
    }

    let chain = LinkChainConfig::default();
    let pair = chain.domain_pair()?;
    // Full torque on every joint: only the source domain can move the base.
    let push = Scripted(|_: &[f64]| vec![4.0, 0.0, 0.0]);
    println!("link chain, constant torque on the base joint:");
    for domain in [Domain::Source, Domain::Target] {
        let env = pair.get(domain);
        let traj = rollout(&push, env, 10, &mut rng::stream(0, 0))?;
        let last = &traj.last().unwrap().s_next;
        println!("  {:6}: base angle after 10 steps {:+.3}", domain.as_str(), last[0]);
    }
    Ok(())
}
