use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dd::DDConfig;
use crate::env::{DomainPair, Env, LinkChainConfig, PointMazeConfig};
use crate::error::{Error, Result};
use crate::irl::DiscConfig;
use crate::policy::PolicyOptConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Pointmaze,
    Linkchain,
}

impl Task {
    /// Target:source rollout ratio used when a config leaves it unset.
    pub fn default_ratio(self) -> usize {
        match self {
            Task::Pointmaze => 30,
            Task::Linkchain => 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Odirl,
    Airl,
    AirlSourceTransfer,
    Gail,
    ExpertTransfer,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Odirl => "odirl",
            Method::Airl => "airl",
            Method::AirlSourceTransfer => "airl_source_transfer",
            Method::Gail => "gail",
            Method::ExpertTransfer => "expert_transfer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Method::Odirl,
            Method::Airl,
            Method::AirlSourceTransfer,
            Method::Gail,
            Method::ExpertTransfer,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExpertConfig {
    pub seed: u64,
    pub iterations: usize,
    pub episodes_per_iter: usize,
    pub policy: PolicyOptConfig,
}

impl Default for ExpertConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 300,
            episodes_per_iter: 8,
            policy: PolicyOptConfig {
                entropy_coef: 0.0,
                ..PolicyOptConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoConfig {
    /// Demonstration CSV.
    pub path: PathBuf,
    /// Expert policy checkpoint used by `collect-demos`.
    pub expert_path: PathBuf,
    pub episodes: usize,
    /// Keep only episodes that end in success.
    pub successful_only: bool,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("demos.csv"),
            expert_path: PathBuf::from("expert.ckpt"),
            episodes: 50,
            successful_only: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BufferConfig {
    pub target_capacity: usize,
    pub source_capacity: usize,
}

impl Default for BufferConfig {
    fn default() -> Self {
        Self {
            target_capacity: 1_000_000,
            source_capacity: 100_000,
        }
    }
}

/// One experiment: task, method, budgets and every sub-module setting.
///
/// `alpha` is authoritative; `dd.alpha` is overwritten with it on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default = "default_method")]
    pub method: Method,
    /// Target rollouts per source rollout; task default when absent.
    #[serde(default)]
    pub ratio: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Training iterations N.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub flip_reward_sign: bool,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default = "default_eval_episodes")]
    pub eval_episodes: usize,
    /// Iterations between checkpoints; 0 writes only the final one.
    #[serde(default)]
    pub checkpoint_every: usize,
    /// Episodes per rollout, in either domain.
    #[serde(default = "default_rollout_episodes")]
    pub rollout_episodes: usize,
    #[serde(default = "default_alphas")]
    pub ablation_alphas: Vec<f64>,
    #[serde(default = "default_heatmap_resolution")]
    pub heatmap_resolution: usize,
    #[serde(default)]
    pub demos: DemoConfig,
    #[serde(default)]
    pub expert: ExpertConfig,
    #[serde(default)]
    pub pointmaze: PointMazeConfig,
    #[serde(default)]
    pub linkchain: LinkChainConfig,
    #[serde(default)]
    pub policy: PolicyOptConfig,
    #[serde(default)]
    pub disc: DiscConfig,
    #[serde(default)]
    pub dd: DDConfig,
    #[serde(default)]
    pub buffers: BufferConfig,
}

fn default_method() -> Method {
    Method::Odirl
}
fn default_alpha() -> f64 {
    1.0
}
fn default_steps() -> usize {
    1000
}
fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2]
}
fn default_out() -> PathBuf {
    PathBuf::from("runs")
}
fn default_eval_every() -> usize {
    10
}
fn default_eval_episodes() -> usize {
    20
}
fn default_rollout_episodes() -> usize {
    1
}
fn default_alphas() -> Vec<f64> {
    vec![0.0, 0.1, 0.5, 1.0, 2.0]
}
fn default_heatmap_resolution() -> usize {
    50
}

impl ExperimentConfig {
    /// Defaults for `task`.
    pub fn new(task: Task) -> Self {
        let mut cfg: Self = toml::from_str(&format!(
            "task = \"{}\"",
            match task {
                Task::Pointmaze => "pointmaze",
                Task::Linkchain => "linkchain",
            }
        ))
        .expect("default config parses");
        cfg.sync();
        cfg
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text)?;
        cfg.sync();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Missing(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Propagates top-level settings into sub-configs.
    pub fn sync(&mut self) {
        self.dd.alpha = self.alpha;
    }

    pub fn ratio(&self) -> usize {
        self.ratio.unwrap_or_else(|| self.task.default_ratio())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.ratio() == 0 {
            return bad("ratio must be at least 1".into());
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be a non-negative number, got {}", self.alpha));
        }
        if self.method != Method::Odirl && self.alpha != default_alpha() && self.alpha != 0.0 {
            log::warn!("alpha = {} is ignored by method {}", self.alpha, self.method.as_str());
        }
        if self.eval_every == 0 || self.eval_episodes == 0 || self.rollout_episodes == 0 {
            return bad("eval_every, eval_episodes and rollout_episodes must be positive".into());
        }
        if self.buffers.target_capacity == 0 || self.buffers.source_capacity == 0 {
            return bad("buffer capacities must be positive".into());
        }
        if self.ablation_alphas.iter().any(|a| !(*a >= 0.0)) {
            return bad("ablation alphas must be non-negative".into());
        }
        self.policy.validate()?;
        self.expert.policy.validate()?;
        self.disc.validate()?;
        self.dd.validate()?;
        match self.task {
            Task::Pointmaze => self.pointmaze.validate(),
            Task::Linkchain => self.linkchain.validate(),
        }
    }

    pub fn domain_pair(&self) -> Result<DomainPair<Env>> {
        match self.task {
            Task::Pointmaze => self.pointmaze.domain_pair(),
            Task::Linkchain => self.linkchain.domain_pair(),
        }
    }

    /// Hash of the environment section in use, stored with demonstrations.
    pub fn env_hash(&self) -> Result<String> {
        match self.task {
            Task::Pointmaze => crate::buffers::config_hash(&("pointmaze", &self.pointmaze)),
            Task::Linkchain => crate::buffers::config_hash(&("linkchain", &self.linkchain)),
        }
    }
}
