//! ODIRL at several α on the point maze, followed by a text rendering of the
//! learned state reward g(s) for each α. `#` marks the target wall, `G` the
//! goal and the digits rank g from low (0) to high (9).
//!
//! cargo run --release --example ablation_heatmap -- [steps]

use std::path::{Path, PathBuf};

use odirl::env::{Env, Environment, Rect};
use odirl::harness::{self, ExperimentConfig};
use odirl::irl::HeatmapCell;

fn render(cells: &[HeatmapCell], n: usize, env: &Env) -> String {
    let (lo, hi) = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.value), hi.max(c.value)));
    let maze = env.as_point_maze().expect("point maze");
    let mut out = String::new();
    for j in (0..n).rev() {
        for i in 0..n {
            let c = &cells[j * n + i];
            let p = [c.x, c.y];
            let half = 0.5 / n as f64;
            let cell = Rect::new([c.x - half, c.y - half], [c.x + half, c.y + half]);
            let ch = if maze.wall().intersects(&cell) {
                '#'
            } else if env.is_success(&p) {
                'G'
            } else {
                char::from_digit((9.0 * (c.value - lo) / (hi - lo).max(1e-12)).round() as u32, 10).unwrap()
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

fn main() -> odirl::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ODIRL_LOG_LEVEL", "warn")).init();
    let steps: usize = std::env::args().nth(1).map(|s| s.parse().expect("steps is a number")).unwrap_or(150);
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/pointmaze.toml");
    let mut cfg = ExperimentConfig::load(&config)?;
    let out = PathBuf::from("runs/example/ablation");
    cfg.out_dir = out.clone();
    cfg.demos.path = out.join("demos.csv");
    cfg.demos.expert_path = out.join("expert.ckpt");
    cfg.steps = steps;
    cfg.seeds = vec![0];
    cfg.eval_every = steps;
    cfg.heatmap_resolution = 24;
    harness::prepare_demos(&cfg)?;

    let target = cfg.domain_pair()?.target;
    for s in harness::run_ablation(&cfg, &[0.0, 1.0, 2.0])? {
        println!("{}: return {:.3}, success {:.2}", s.label, s.final_gt_return, s.final_success_rate);
        let path = out.join("ablation").join(&s.label).join("seed_0/heatmap.csv");
        let cells: Vec<HeatmapCell> = csv::Reader::from_path(&path)?.deserialize().collect::<Result<_, _>>()?;
        println!("{}", render(&cells, cfg.heatmap_resolution, &target));
    }
    Ok(())
}
