use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use odirl::env::Domain;
use odirl::harness::{self, ExperimentConfig, Method, RunLog};
use odirl::irl::{write_heatmap, AirlDiscriminator};
use odirl::policy::GaussianPolicy;
use odirl::Result;

#[derive(Parser)]
#[command(name = "odirl", version, about = "Off-dynamics inverse reinforcement learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Run only this seed instead of the configured list.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Training iterations N.
    #[arg(long)]
    steps: Option<usize>,
    /// Train the generator on log(1-D) - log D instead of log D - log(1-D).
    #[arg(long)]
    flip_reward_sign: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seeds = vec![s];
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(n) = self.steps {
            cfg.steps = n;
        }
        cfg.flip_reward_sign |= self.flip_reward_sign;
        cfg.sync();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the source-domain expert on the ground-truth reward.
    TrainExpert {
        #[command(flatten)]
        common: Common,
        /// Checkpoint path (defaults to demos.expert_path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Roll out the expert in the source domain and save demonstrations.
    CollectDemos {
        #[command(flatten)]
        common: Common,
        /// Demo CSV path (defaults to demos.path).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Expert checkpoint (defaults to demos.expert_path).
        #[arg(long)]
        expert: Option<PathBuf>,
    },
    /// Train one method (odirl, airl, airl_source_transfer, gail, expert_transfer).
    Run {
        #[command(flatten)]
        common: Common,
        /// Overrides the config's method.
        #[arg(long)]
        method: Option<String>,
        /// Output root (defaults to out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ODIRL once per α.
    Ablate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated α values (defaults to ablation_alphas).
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate g on a grid from a run directory or discriminator checkpoint.
    Heatmap {
        /// Run directory (uses checkpoints/disc.ckpt and config.toml) or a checkpoint file.
        source: PathBuf,
        /// Config, required when `source` is a checkpoint file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "heatmap.csv")]
        out: PathBuf,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Per-method mean/min/max of ground-truth return over seeds.
    Aggregate {
        /// Run directories (each containing progress.csv).
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "summary.csv")]
        out: PathBuf,
    },
    /// Evaluate a policy checkpoint with deterministic rollouts.
    Eval {
        checkpoint: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "target")]
        domain: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ODIRL_LOG_LEVEL", "info")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::TrainExpert { common, out } => {
            let cfg = common.load()?;
            let seed = common.seed.unwrap_or(cfg.expert.seed);
            let (expert, res) = harness::train_expert(&cfg, seed)?;
            let path = out.unwrap_or(cfg.demos.expert_path.clone());
            create_parent(&path)?;
            expert.save(&path, seed)?;
            println!("expert saved to {}: return {:.4}, success {:.2}", path.display(), res.mean_return, res.success_rate);
        }
        Command::CollectDemos { common, out, expert } => {
            let cfg = common.load()?;
            let seed = common.seed.unwrap_or(cfg.expert.seed);
            let expert = GaussianPolicy::load(&expert.unwrap_or(cfg.demos.expert_path.clone()))?;
            let demos = harness::collect_demos(&cfg, &expert, seed)?;
            let path = out.unwrap_or(cfg.demos.path.clone());
            create_parent(&path)?;
            demos.save(&path)?;
            println!("{} transitions in {} episodes saved to {}", demos.len(), demos.trajectories().len(), path.display());
        }
        Command::Run { common, method, out } => {
            let mut cfg = common.load()?;
            if let Some(m) = method {
                cfg.method = Method::parse(&m).ok_or_else(|| odirl::Error::Config(format!("unknown method '{m}'")))?;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            for s in harness::run(&cfg)? {
                println!(
                    "{} seed {}: return {:.4}, success {:.2} (target steps {}, source steps {})",
                    s.label, s.seed, s.final_gt_return, s.final_success_rate, s.target_steps, s.source_steps
                );
            }
        }
        Command::Ablate { common, alphas, out } => {
            let mut cfg = common.load()?;
            cfg.method = Method::Odirl;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            let alphas = alphas.unwrap_or(cfg.ablation_alphas.clone());
            for s in harness::run_ablation(&cfg, &alphas)? {
                println!("{} seed {}: return {:.4}, success {:.2}", s.label, s.seed, s.final_gt_return, s.final_success_rate);
            }
        }
        Command::Heatmap { source, config, out, resolution } => {
            let (ckpt, cfg_path) = if source.is_dir() {
                (source.join("checkpoints").join("disc.ckpt"), config.unwrap_or(source.join("config.toml")))
            } else {
                let c = config.ok_or_else(|| odirl::Error::Config("--config is required with a checkpoint file".into()))?;
                (source, c)
            };
            let cfg = ExperimentConfig::load(&cfg_path)?;
            let spec = cfg.domain_pair()?.spec().clone();
            let mut disc = AirlDiscriminator::new(spec.state_dim, spec.action_dim, cfg.disc.clone(), 0)?;
            disc.load_weights(&ckpt)?;
            let cells = disc.reward_heatmap(resolution.unwrap_or(cfg.heatmap_resolution))?;
            create_parent(&out)?;
            write_heatmap(std::fs::File::create(&out)?, &cells)?;
            println!("{} cells written to {}", cells.len(), out.display());
        }
        Command::Aggregate { runs, out } => {
            let logs = runs.iter().map(|d| RunLog::load(d)).collect::<Result<Vec<_>>>()?;
            let rows = harness::aggregate(&logs)?;
            create_parent(&out)?;
            harness::write_summary(std::fs::File::create(&out)?, &rows)?;
            println!("{} rows written to {}", rows.len(), out.display());
        }
        Command::Eval { checkpoint, common, domain } => {
            let cfg = common.load()?;
            let domain = Domain::parse(&domain).ok_or_else(|| odirl::Error::Config(format!("unknown domain '{domain}'")))?;
            let res = harness::eval_checkpoint(&cfg, &checkpoint, domain, cfg.seeds[0])?;
            println!("{}: return {:.4}, success {:.2} over {} episodes", domain.as_str(), res.mean_return, res.success_rate, res.episodes);
        }
    }
    Ok(())
}

fn create_parent(path: &std::path::Path) -> Result<()> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(p)?;
    }
    Ok(())
}
