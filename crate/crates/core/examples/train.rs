//! Full pipeline on one task: train a source expert, record demonstrations,
//! then learn in the target domain with ODIRL and with plain AIRL.
//!
//! cargo run --release --example train -- [pointmaze|linkchain] [steps]
//!
//! Artifacts land in runs/example/<task>/.

use std::path::{Path, PathBuf};

use odirl::harness::{self, ExperimentConfig, Method};

fn main() -> odirl::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ODIRL_LOG_LEVEL", "info")).init();
    let mut args = std::env::args().skip(1);
    let task = args.next().unwrap_or_else(|| "pointmaze".into());
    let steps: usize = args.next().map(|s| s.parse().expect("steps is a number")).unwrap_or(150);

    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{task}.toml"));
    let mut cfg = ExperimentConfig::load(&config)?;
    let out = PathBuf::from("runs/example").join(&task);
    cfg.out_dir = out.clone();
    cfg.demos.path = out.join("demos.csv");
    cfg.demos.expert_path = out.join("expert.ckpt");
    cfg.steps = steps;
    cfg.seeds = vec![0];
    cfg.eval_every = (steps / 5).max(1);

    let (demos, _) = harness::prepare_demos(&cfg)?;
    println!("{} demonstration transitions from the source expert", demos.len());

    for method in [Method::ExpertTransfer, Method::Airl, Method::Odirl] {
        cfg.method = method;
        for s in harness::run(&cfg)? {
            println!(
                "{:16} return {:8.3}  success {:.2}  target steps {:6}  source steps {:5}",
                s.label, s.final_gt_return, s.final_success_rate, s.target_steps, s.source_steps
            );
        }
    }
    println!("progress logs: {}/<method>/seed_0/progress.csv", out.display());
    Ok(())
}
