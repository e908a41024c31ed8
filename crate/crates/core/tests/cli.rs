//! End-to-end smoke test of the `odirl` binary on a tiny point-maze config.

use std::path::Path;
use std::process::Command;

fn odirl(dir: &Path, args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_odirl"))
        .args(args)
        .current_dir(dir)
        .env("ODIRL_LOG_LEVEL", "warn")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "odirl {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const CONFIG: &str = r#"
task = "pointmaze"
steps = 6
seeds = [0]
ratio = 3
out_dir = "runs"
eval_every = 3
eval_episodes = 2

[demos]
path = "demos.csv"
expert_path = "expert.ckpt"
episodes = 4
successful_only = false

[expert]
iterations = 2

[policy.arch]
hidden = [8]
activation = "tanh"

[disc.arch]
hidden = [8]
activation = "tanh"

[dd.arch]
hidden = [8]
activation = "tanh"
"#;

#[test]
fn full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("tiny.toml"), CONFIG).unwrap();
    let c = ["--config", "tiny.toml"];

    odirl(d, &["train-expert", c[0], c[1]]);
    assert!(d.join("expert.ckpt").exists());
    odirl(d, &["collect-demos", c[0], c[1]]);
    assert!(d.join("demos.csv").exists());

    odirl(d, &["run", c[0], c[1], "--seed", "1", "--alpha", "0.5", "--steps", "4", "--flip-reward-sign"]);
    let progress = std::fs::read_to_string(d.join("runs/odirl/seed_1/progress.csv")).unwrap();
    let mut lines = progress.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iteration,target_steps,source_steps,disc_loss,classifier_loss,mean_dd,policy_entropy,gt_return,success_rate"
    );
    assert_eq!(lines.count(), 4);

    odirl(d, &["run", c[0], c[1], "--method", "airl", "--out", "other"]);
    assert!(d.join("other/airl/seed_0/checkpoints/policy.ckpt").exists());

    odirl(d, &["ablate", c[0], c[1], "--alphas", "0,1"]);
    for a in ["alpha_0", "alpha_1"] {
        assert!(d.join("runs/ablation").join(a).join("seed_0/heatmap.csv").exists());
    }

    let stdout = odirl(d, &["heatmap", "runs/odirl/seed_1", "--out", "hm.csv", "--resolution", "5"]);
    assert!(stdout.contains("25 cells"));

    odirl(d, &["aggregate", "runs/ablation/alpha_0/seed_0", "runs/ablation/alpha_1/seed_0", "--out", "summary.csv"]);
    let summary = std::fs::read_to_string(d.join("summary.csv")).unwrap();
    assert!(summary.contains("alpha_0") && summary.contains("alpha_1"));

    let stdout = odirl(d, &["eval", "runs/odirl/seed_1/checkpoints/policy.ckpt", c[0], c[1], "--domain", "source"]);
    assert!(stdout.starts_with("source: return"));
}

#[test]
fn bad_config_exits_with_failure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "task = \"pointmaze\"\nalpha = -1.0\n").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_odirl"))
        .args(["run", "--config", "bad.toml"])
        .current_dir(dir.path())
        .env("ODIRL_LOG_LEVEL", "off")
        .status()
        .unwrap();
    assert!(!status.success());
}
