use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::progress::{ProgressRow, ProgressWriter};
use crate::buffers::{DemoMeta, DemoSet, ReplayBuffer};
use crate::dd::ClassifierPair;
use crate::env::{rollout, write_transitions, Domain, DomainPair, Env, Environment, Trajectory, Transition};
use crate::error::{Error, Result};
use crate::irl::{write_heatmap, AirlDiscriminator, DiscSample, DiscStats, GailDiscriminator, RewardInput};
use crate::policy::{evaluate, EvalResult, GaussianPolicy, MaxEntLearner};
use crate::rng::{self, Rng64};

// Independent random streams of one run.
const S_TARGET: u64 = 1;
const S_SOURCE: u64 = 2;
const S_CLASSIFIER: u64 = 3;
const S_DISC: u64 = 4;
const S_POLICY: u64 = 5;
const S_EXPERT: u64 = 6;
const S_DEMOS: u64 = 7;
const S_EVAL: u64 = 1 << 32;

fn init_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k)
}

fn eval_rng(seed: u64, iteration: u64) -> Rng64 {
    rng::stream(seed, S_EVAL + iteration)
}

/// What a finished run reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: Method,
    /// Label used to group runs when aggregating.
    pub label: String,
    pub seed: u64,
    pub alpha: f64,
    pub ratio: usize,
    pub iterations: usize,
    pub target_steps: u64,
    pub source_steps: u64,
    pub source_rollouts: u64,
    pub final_gt_return: f64,
    pub final_success_rate: f64,
    pub demo_warnings: Vec<String>,
}

/// Trains a source-domain expert on the ground-truth reward. Returns the
/// policy with the best deterministic evaluation seen.
pub fn train_expert(cfg: &ExperimentConfig, seed: u64) -> Result<(GaussianPolicy, EvalResult)> {
    let pair = cfg.domain_pair()?;
    let env = &pair.source;
    let spec = env.spec().clone();
    let ecfg = &cfg.expert;
    let mut learner = MaxEntLearner::new(&spec, ecfg.policy.clone(), init_seed(seed, S_EXPERT))?;
    let mut r_roll = rng::stream(seed, S_EXPERT);
    let mut r_upd = rng::stream(seed, S_POLICY);
    let mut best: Option<(GaussianPolicy, EvalResult)> = None;
    for it in 1..=ecfg.iterations {
        let batch = (0..ecfg.episodes_per_iter)
            .map(|_| rollout(&learner.policy, env, spec.horizon, &mut r_roll))
            .collect::<Result<Vec<Trajectory>>>()?;
        // The expert is the one learner trained on the evaluation reward.
        let rewards: Vec<Vec<f64>> = batch
            .iter()
            .map(|t| t.iter().map(Transition::evaluation_reward).collect())
            .collect();
        learner.update(&batch, &rewards, &mut r_upd)?;
        if it % cfg.eval_every == 0 || it == ecfg.iterations {
            let res = evaluate(&learner.policy, env, cfg.eval_episodes, &mut eval_rng(seed, it as u64))?;
            log::info!(
                "expert iteration {it}: return {:.3}, success {:.2}",
                res.mean_return,
                res.success_rate
            );
            let better = best.as_ref().is_none_or(|(_, b)| {
                (res.success_rate, res.mean_return) > (b.success_rate, b.mean_return)
            });
            if better {
                best = Some((learner.policy.clone(), res));
            }
        }
    }
    Ok(best.expect("at least one evaluation"))
}

/// Rolls out the (stochastic) expert in the source domain.
pub fn collect_demos(cfg: &ExperimentConfig, expert: &GaussianPolicy, seed: u64) -> Result<DemoSet> {
    let pair = cfg.domain_pair()?;
    let env = &pair.source;
    let horizon = env.spec().horizon;
    let mut r = rng::stream(seed, S_DEMOS);
    let mut trajs = Vec::new();
    let max_attempts = 10 * cfg.demos.episodes.max(1);
    let mut attempts = 0;
    while trajs.len() < cfg.demos.episodes && attempts < max_attempts {
        attempts += 1;
        let t = rollout(expert, env, horizon, &mut r)?;
        let ok = t.last().is_some_and(|x| env.is_success(&x.s_next));
        if ok || !cfg.demos.successful_only {
            trajs.push(t.into_iter().map(Transition::without_evaluation_reward).collect());
        }
    }
    if trajs.len() < cfg.demos.episodes {
        log::warn!(
            "only {} of {} demonstration episodes succeeded",
            trajs.len(),
            cfg.demos.episodes
        );
    }
    let meta = DemoMeta {
        env_config_hash: cfg.env_hash()?,
        expert_seed: seed,
        horizon,
        state_dim: env.spec().state_dim,
        action_dim: env.spec().action_dim,
    };
    DemoSet::new(trajs, meta)
}

/// Loads the configured demonstrations; a missing file is an error.
pub fn load_demos(cfg: &ExperimentConfig) -> Result<(DemoSet, Vec<String>)> {
    let path = &cfg.demos.path;
    if !path.exists() {
        return Err(Error::Missing(format!(
            "demonstrations {} (run train-expert and collect-demos first)",
            path.display()
        )));
    }
    let pair = cfg.domain_pair()?;
    DemoSet::load(path, pair.spec(), Some(&cfg.env_hash()?))
}

/// Loads demonstrations, training an expert and collecting them first if
/// the files do not exist yet.
pub fn prepare_demos(cfg: &ExperimentConfig) -> Result<(DemoSet, Vec<String>)> {
    if !cfg.demos.path.exists() {
        let expert = if cfg.demos.expert_path.exists() {
            GaussianPolicy::load(&cfg.demos.expert_path)?
        } else {
            let (expert, res) = train_expert(cfg, cfg.expert.seed)?;
            log::info!("expert: return {:.3}, success {:.2}", res.mean_return, res.success_rate);
            ensure_parent(&cfg.demos.expert_path)?;
            expert.save(&cfg.demos.expert_path, cfg.expert.seed)?;
            expert
        };
        let demos = collect_demos(cfg, &expert, cfg.expert.seed)?;
        ensure_parent(&cfg.demos.path)?;
        demos.save(&cfg.demos.path)?;
    }
    load_demos(cfg)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(p) = path.parent() {
        if !p.as_os_str().is_empty() {
            fs::create_dir_all(p)?;
        }
    }
    Ok(())
}

/// Directory of one seed of one method.
pub fn run_dir(cfg: &ExperimentConfig, seed: u64) -> PathBuf {
    cfg.out_dir.join(cfg.method.as_str()).join(format!("seed_{seed}"))
}

/// Runs every configured seed of `cfg.method` into `run_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        let dir = run_dir(cfg, seed);
        out.push(run_seed(cfg, seed, &dir, cfg.method.as_str())?);
    }
    Ok(out)
}

/// One seed of the configured method, artifacts written to `dir`.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64, dir: &Path, label: &str) -> Result<RunSummary> {
    cfg.validate()?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let summary = match cfg.method {
        Method::ExpertTransfer => run_expert_transfer(cfg, seed, dir, label)?,
        method => {
            let (demos, warnings) = load_demos(cfg)?;
            let mut s = match method {
                Method::Odirl | Method::Airl => run_adversarial(cfg, seed, &demos, dir, label, false)?,
                Method::Gail => run_adversarial(cfg, seed, &demos, dir, label, true)?,
                Method::AirlSourceTransfer => run_source_transfer(cfg, seed, &demos, dir, label)?,
                Method::ExpertTransfer => unreachable!(),
            };
            s.demo_warnings = warnings;
            s
        }
    };
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    log::info!(
        "{label} seed {seed}: return {:.3}, success {:.2}, target steps {}, source steps {}",
        summary.final_gt_return,
        summary.final_success_rate,
        summary.target_steps,
        summary.source_steps
    );
    Ok(summary)
}

fn effective_alpha(cfg: &ExperimentConfig) -> f64 {
    match cfg.method {
        Method::Odirl => cfg.alpha,
        _ => 0.0,
    }
}

fn summary(cfg: &ExperimentConfig, seed: u64, label: &str, last: &ProgressRow, source_rollouts: u64) -> RunSummary {
    RunSummary {
        method: cfg.method,
        label: label.to_string(),
        seed,
        alpha: effective_alpha(cfg),
        ratio: cfg.ratio(),
        iterations: cfg.steps,
        target_steps: last.target_steps,
        source_steps: last.source_steps,
        source_rollouts,
        final_gt_return: last.gt_return.unwrap_or(f64::NAN),
        final_success_rate: last.success_rate.unwrap_or(f64::NAN),
        demo_warnings: Vec::new(),
    }
}

enum Disc {
    Airl(AirlDiscriminator),
    Gail(GailDiscriminator),
}

impl Disc {
    fn update(&mut self, demos: &[DiscSample], samples: &[DiscSample]) -> Result<DiscStats> {
        match self {
            Disc::Airl(d) => d.update(demos, samples),
            Disc::Gail(d) => d.update(demos, samples),
        }
    }

    fn reward(&self, t: &Transition, log_pi: f64, flip: bool) -> Result<f64> {
        match self {
            Disc::Airl(d) => d.policy_reward(t, log_pi, flip),
            Disc::Gail(d) => {
                let r = d.policy_reward(t)?;
                Ok(if flip { -r } else { r })
            }
        }
    }
}

fn should_eval(cfg: &ExperimentConfig, it: usize) -> bool {
    it % cfg.eval_every == 0 || it == cfg.steps
}

fn should_checkpoint(cfg: &ExperimentConfig, it: usize) -> bool {
    it == cfg.steps || (cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// The main loop. With `gail` the discriminator is the plain `(s, a)`
/// classifier and no dynamics classifiers are trained; otherwise this is
/// the shaped discriminator with `α · DD` on demonstration logits (α = 0
/// for the AIRL baseline).
fn run_adversarial(
    cfg: &ExperimentConfig,
    seed: u64,
    demos: &DemoSet,
    dir: &Path,
    label: &str,
    gail: bool,
) -> Result<RunSummary> {
    let pair = cfg.domain_pair()?;
    let spec = pair.spec().clone();
    let (sd, ad) = (spec.state_dim, spec.action_dim);
    let mut learner = MaxEntLearner::new(&spec, cfg.policy.clone(), init_seed(seed, S_POLICY))?;
    let mut disc = if gail {
        Disc::Gail(GailDiscriminator::new(sd, ad, cfg.disc.clone(), init_seed(seed, S_DISC))?)
    } else {
        Disc::Airl(AirlDiscriminator::new(sd, ad, cfg.disc.clone(), init_seed(seed, S_DISC))?)
    };
    let mut dd_cfg = cfg.dd.clone();
    dd_cfg.alpha = effective_alpha(cfg);
    let mut classifiers = ClassifierPair::new(sd, ad, dd_cfg, init_seed(seed, S_CLASSIFIER))?;
    let mut b_target = ReplayBuffer::new(cfg.buffers.target_capacity, Domain::Target);
    let mut b_source = ReplayBuffer::new(cfg.buffers.source_capacity, Domain::Source);

    let mut r_target = rng::stream(seed, S_TARGET);
    let mut r_source = rng::stream(seed, S_SOURCE);
    let mut r_clf = rng::stream(seed, S_CLASSIFIER);
    let mut r_disc = rng::stream(seed, S_DISC);
    let mut r_policy = rng::stream(seed, S_POLICY);

    let ckpt_dir = dir.join("checkpoints");
    fs::create_dir_all(&ckpt_dir)?;
    let mut progress = ProgressWriter::create(&dir.join("progress.csv"))?;
    let ratio = cfg.ratio();
    let (mut target_steps, mut source_steps, mut source_rollouts) = (0u64, 0u64, 0u64);
    let mut last = ProgressRow::default();

    for it in 1..=cfg.steps {
        let mut latest = Vec::with_capacity(cfg.rollout_episodes);
        for _ in 0..cfg.rollout_episodes {
            let traj = rollout(&learner.policy, &pair.target, spec.horizon, &mut r_target)?;
            target_steps += traj.len() as u64;
            b_target.push(&traj)?;
            latest.push(traj);
        }
        if (it - 1) % ratio == 0 {
            for _ in 0..cfg.rollout_episodes {
                let traj = rollout(&learner.policy, &pair.source, spec.horizon, &mut r_source)?;
                source_steps += traj.len() as u64;
                b_source.push(&traj)?;
            }
            source_rollouts += 1;
        }

        let mut classifier_loss = None;
        if !gail {
            for _ in 0..cfg.dd.steps_per_iter {
                let src = b_source.sample(cfg.dd.batch_size, &mut r_clf)?;
                let tgt = b_target.sample(cfg.dd.batch_size, &mut r_clf)?;
                classifier_loss = Some(classifiers.train_step(&src, &tgt, &mut r_clf)?.total());
            }
        }

        let mut disc_stats = DiscStats::default();
        let mut dd_values = Vec::new();
        for _ in 0..cfg.disc.steps_per_iter {
            let demo_batch = demos.sample(cfg.disc.batch_size, &mut r_disc);
            let policy_batch = b_target.sample(cfg.disc.batch_size, &mut r_disc)?;
            dd_values.clear();
            let mut demo_samples = Vec::with_capacity(demo_batch.len());
            for t in demo_batch {
                let log_pi = learner.policy.log_prob(&t.s, &t.a)?;
                let dd = if gail { 0.0 } else { classifiers.dd_transition(t)? };
                dd_values.push(dd);
                demo_samples.push(DiscSample::new(t, log_pi).with_dd(dd));
            }
            let policy_samples = policy_batch
                .iter()
                .map(|t| Ok(DiscSample::new(t, learner.policy.log_prob(&t.s, &t.a)?)))
                .collect::<Result<Vec<_>>>()?;
            disc_stats = disc.update(&demo_samples, &policy_samples)?;
        }

        let policy = &learner.policy;
        let rewards = latest
            .iter()
            .map(|traj| {
                traj.iter()
                    .map(|t| disc.reward(t, policy.log_prob(&t.s, &t.a)?, cfg.flip_reward_sign))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let stats = learner.update(&latest, &rewards, &mut r_policy)?;

        let mut row = ProgressRow {
            iteration: it as u64,
            target_steps,
            source_steps,
            disc_loss: Some(disc_stats.loss),
            classifier_loss,
            mean_dd: (!gail && !dd_values.is_empty()).then(|| mean(&dd_values)),
            policy_entropy: Some(stats.entropy),
            gt_return: None,
            success_rate: None,
        };
        if should_eval(cfg, it) {
            let res = evaluate(&learner.policy, &pair.target, cfg.eval_episodes, &mut eval_rng(seed, it as u64))?;
            row.gt_return = Some(res.mean_return);
            row.success_rate = Some(res.success_rate);
            log::debug!("{label} seed {seed} iteration {it}: return {:.3} success {:.2}", res.mean_return, res.success_rate);
        }
        progress.write(&row)?;
        if should_checkpoint(cfg, it) {
            learner.policy.save(&ckpt_dir.join("policy.ckpt"), seed)?;
            match &disc {
                Disc::Airl(d) => d.save(&ckpt_dir.join("disc.ckpt"), seed)?,
                Disc::Gail(d) => d.to_checkpoint(seed).save(&ckpt_dir.join("disc.ckpt"))?,
            }
            if !gail {
                classifiers.save(&ckpt_dir.join("classifiers.ckpt"), seed)?;
            }
        }
        last = row;
    }

    if let Disc::Airl(d) = &disc {
        if d.config.reward_input == RewardInput::StateOnly && sd == 2 {
            let cells = d.reward_heatmap(cfg.heatmap_resolution)?;
            write_heatmap(BufWriter::new(File::create(dir.join("heatmap.csv"))?), &cells)?;
        }
    }
    write_final_trajectories(cfg, &learner.policy, &pair, seed, dir, Domain::Target)?;
    Ok(summary(cfg, seed, label, &last, source_rollouts))
}

/// Deterministic rollouts of the final policy, as a transition dump.
pub fn write_final_trajectories(
    cfg: &ExperimentConfig,
    policy: &GaussianPolicy,
    pair: &DomainPair<Env>,
    seed: u64,
    dir: &Path,
    domain: Domain,
) -> Result<Vec<Trajectory>> {
    let env = pair.get(domain);
    let mut r = eval_rng(seed, u32::MAX as u64);
    let n = cfg.eval_episodes.min(10);
    let trajs = (0..n)
        .map(|_| rollout(&policy.deterministic(), env, env.spec().horizon, &mut r))
        .collect::<Result<Vec<_>>>()?;
    let name = format!("{}_trajectories.csv", domain.as_str());
    let spec = env.spec();
    write_transitions(
        BufWriter::new(File::create(dir.join(name))?),
        trajs.iter().flatten(),
        spec.state_dim,
        spec.action_dim,
    )?;
    Ok(trajs)
}

/// Shaped AIRL trained in the source domain on `⌈N/r⌉` source rollouts with
/// `r` discriminator and policy updates per rollout, then its `g` used as
/// the reward for a fresh policy trained N iterations in the target.
fn run_source_transfer(
    cfg: &ExperimentConfig,
    seed: u64,
    demos: &DemoSet,
    dir: &Path,
    label: &str,
) -> Result<RunSummary> {
    let pair = cfg.domain_pair()?;
    let spec = pair.spec().clone();
    let (sd, ad) = (spec.state_dim, spec.action_dim);
    let ratio = cfg.ratio();
    let rollouts = cfg.steps.div_ceil(ratio);

    let mut src_learner = MaxEntLearner::new(&spec, cfg.policy.clone(), init_seed(seed, S_POLICY))?;
    let mut disc = AirlDiscriminator::new(sd, ad, cfg.disc.clone(), init_seed(seed, S_DISC))?
        .with_sample_domain(Domain::Source);
    let mut b_source = ReplayBuffer::new(cfg.buffers.source_capacity, Domain::Source);
    let mut r_source = rng::stream(seed, S_SOURCE);
    let mut r_disc = rng::stream(seed, S_DISC);
    let mut r_policy = rng::stream(seed, S_POLICY);
    let mut source_steps = 0u64;
    let mut src_progress = ProgressWriter::create(&dir.join("source_progress.csv"))?;
    for k in 1..=rollouts {
        let mut batch = Vec::with_capacity(cfg.rollout_episodes);
        for _ in 0..cfg.rollout_episodes {
            let traj = rollout(&src_learner.policy, &pair.source, spec.horizon, &mut r_source)?;
            source_steps += traj.len() as u64;
            b_source.push(&traj)?;
            batch.push(traj);
        }
        let mut disc_stats = DiscStats::default();
        let mut entropy = 0.0;
        for _ in 0..ratio {
            for _ in 0..cfg.disc.steps_per_iter {
                let demo_batch = demos.sample(cfg.disc.batch_size, &mut r_disc);
                let policy_batch = b_source.sample(cfg.disc.batch_size, &mut r_disc)?;
                let ds = demo_batch
                    .iter()
                    .map(|t| Ok(DiscSample::new(t, src_learner.policy.log_prob(&t.s, &t.a)?)))
                    .collect::<Result<Vec<_>>>()?;
                let ps = policy_batch
                    .iter()
                    .map(|t| Ok(DiscSample::new(t, src_learner.policy.log_prob(&t.s, &t.a)?)))
                    .collect::<Result<Vec<_>>>()?;
                disc_stats = disc.update(&ds, &ps)?;
            }
            let policy = &src_learner.policy;
            let rewards = batch
                .iter()
                .map(|traj| {
                    traj.iter()
                        .map(|t| disc.policy_reward(t, policy.log_prob(&t.s, &t.a)?, cfg.flip_reward_sign))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            entropy = src_learner.update(&batch, &rewards, &mut r_policy)?.entropy;
        }
        src_progress.write(&ProgressRow {
            iteration: k as u64,
            target_steps: 0,
            source_steps,
            disc_loss: Some(disc_stats.loss),
            policy_entropy: Some(entropy),
            ..ProgressRow::default()
        })?;
    }

    let ckpt_dir = dir.join("checkpoints");
    fs::create_dir_all(&ckpt_dir)?;
    disc.save(&ckpt_dir.join("disc.ckpt"), seed)?;

    let mut learner = MaxEntLearner::new(&spec, cfg.policy.clone(), init_seed(seed, S_POLICY + 100))?;
    let mut r_target = rng::stream(seed, S_TARGET);
    let mut progress = ProgressWriter::create(&dir.join("progress.csv"))?;
    let mut target_steps = 0u64;
    let mut last = ProgressRow::default();
    for it in 1..=cfg.steps {
        let mut latest = Vec::with_capacity(cfg.rollout_episodes);
        for _ in 0..cfg.rollout_episodes {
            let traj = rollout(&learner.policy, &pair.target, spec.horizon, &mut r_target)?;
            target_steps += traj.len() as u64;
            latest.push(traj);
        }
        let rewards = latest
            .iter()
            .map(|traj| traj.iter().map(|t| disc.g_value(&t.s, &t.a)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        let stats = learner.update(&latest, &rewards, &mut r_policy)?;
        let mut row = ProgressRow {
            iteration: it as u64,
            target_steps,
            source_steps,
            policy_entropy: Some(stats.entropy),
            ..ProgressRow::default()
        };
        if should_eval(cfg, it) {
            let res = evaluate(&learner.policy, &pair.target, cfg.eval_episodes, &mut eval_rng(seed, it as u64))?;
            row.gt_return = Some(res.mean_return);
            row.success_rate = Some(res.success_rate);
        }
        progress.write(&row)?;
        if should_checkpoint(cfg, it) {
            learner.policy.save(&ckpt_dir.join("policy.ckpt"), seed)?;
        }
        last = row;
    }
    if disc.config.reward_input == RewardInput::StateOnly && sd == 2 {
        let cells = disc.reward_heatmap(cfg.heatmap_resolution)?;
        write_heatmap(BufWriter::new(File::create(dir.join("heatmap.csv"))?), &cells)?;
    }
    write_final_trajectories(cfg, &learner.policy, &pair, seed, dir, Domain::Target)?;
    Ok(summary(cfg, seed, label, &last, rollouts as u64))
}

/// The source expert evaluated directly in the target domain: one row.
fn run_expert_transfer(cfg: &ExperimentConfig, seed: u64, dir: &Path, label: &str) -> Result<RunSummary> {
    let path = &cfg.demos.expert_path;
    if !path.exists() {
        return Err(Error::Missing(format!("expert checkpoint {}", path.display())));
    }
    let expert = GaussianPolicy::load(path)?;
    let pair = cfg.domain_pair()?;
    let res = evaluate(&expert, &pair.target, cfg.eval_episodes, &mut eval_rng(seed, 0))?;
    let row = ProgressRow {
        iteration: 0,
        policy_entropy: Some(expert.entropy()),
        gt_return: Some(res.mean_return),
        success_rate: Some(res.success_rate),
        ..ProgressRow::default()
    };
    let mut progress = ProgressWriter::create(&dir.join("progress.csv"))?;
    progress.write(&row)?;
    write_final_trajectories(cfg, &expert, &pair, seed, dir, Domain::Target)?;
    Ok(summary(cfg, seed, label, &row, 0))
}

/// Evaluates a saved policy in one domain of the configured task.
pub fn eval_checkpoint(cfg: &ExperimentConfig, path: &Path, domain: Domain, seed: u64) -> Result<EvalResult> {
    let policy = GaussianPolicy::load(path)?;
    let pair = cfg.domain_pair()?;
    evaluate(&policy, pair.get(domain), cfg.eval_episodes, &mut eval_rng(seed, 0))
}

/// One ODIRL run per α with shared demonstrations and seeds, each in
/// `out_dir/ablation/alpha_<α>/seed_<seed>`. Besides the usual artifacts
/// each run dumps its final policy's trajectories in both domains.
pub fn run_ablation(cfg: &ExperimentConfig, alphas: &[f64]) -> Result<Vec<RunSummary>> {
    if alphas.is_empty() {
        return Err(Error::Config("ablation needs at least one alpha".into()));
    }
    if cfg.method != Method::Odirl {
        return Err(Error::Config("ablation requires method = odirl".into()));
    }
    let mut out = Vec::new();
    for &alpha in alphas {
        let mut c = cfg.clone();
        c.alpha = alpha;
        c.sync();
        let label = format!("alpha_{alpha}");
        for &seed in &cfg.seeds {
            let dir = cfg.out_dir.join("ablation").join(&label).join(format!("seed_{seed}"));
            let s = run_seed(&c, seed, &dir, &label)?;
            let policy = GaussianPolicy::load(&dir.join("checkpoints").join("policy.ckpt"))?;
            write_final_trajectories(&c, &policy, &c.domain_pair()?, seed, &dir, Domain::Source)?;
            out.push(s);
        }
    }
    Ok(out)
}
