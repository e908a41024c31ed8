//! Experiment orchestration: configuration, expert and demonstration
//! preparation, the training loops for every method, the α sweep and
//! aggregation of finished runs.

mod config;
mod progress;
mod run;

pub use config::{BufferConfig, DemoConfig, ExperimentConfig, ExpertConfig, Method, Task};
pub use progress::{aggregate, read_progress, write_summary, ProgressRow, ProgressWriter, RunLog, SummaryRow};
pub use run::{
    collect_demos, eval_checkpoint, load_demos, prepare_demos, run, run_ablation, run_dir, run_seed,
    train_expert, write_final_trajectories, RunSummary,
};
