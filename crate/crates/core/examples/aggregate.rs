//! Groups finished runs by method and prints the per-iteration mean, min and
//! max of the ground-truth return over seeds.
//!
//! cargo run --release --example aggregate -- runs/pointmaze/odirl/seed_0 runs/pointmaze/odirl/seed_1 ...
//!
//! Without arguments every `progress.csv` below runs/ is used.

use std::path::{Path, PathBuf};

use odirl::harness::{aggregate, RunLog};

fn find_runs(dir: &Path, out: &mut Vec<PathBuf>) {
    let Ok(entries) = std::fs::read_dir(dir) else { return };
    for e in entries.flatten() {
        let p = e.path();
        if p.is_dir() {
            if p.join("progress.csv").exists() {
                out.push(p.clone());
            }
            find_runs(&p, out);
        }
    }
}

fn main() -> odirl::Result<()> {
    let mut dirs: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if dirs.is_empty() {
        find_runs(Path::new("runs"), &mut dirs);
        dirs.sort();
    }
    if dirs.is_empty() {
        println!("no runs found; try the `train` example first");
        return Ok(());
    }
    let logs = dirs.iter().map(|d| RunLog::load(d)).collect::<odirl::Result<Vec<_>>>()?;
    // Runs of one label must share an evaluation grid, so aggregate per label.
    let mut labels: Vec<String> = logs.iter().map(|l| l.method.clone()).collect();
    labels.sort();
    labels.dedup();
    println!("{:24} {:>9} {:>5} {:>10} {:>10} {:>10} {:>8}", "method", "iteration", "seeds", "mean", "min", "max", "success");
    for label in labels {
        let group: Vec<RunLog> = logs.iter().filter(|l| l.method == label).cloned().collect();
        match aggregate(&group) {
            Ok(rows) => {
                for r in rows {
                    println!(
                        "{:24} {:>9} {:>5} {:>10.3} {:>10.3} {:>10.3} {:>8.2}",
                        r.method, r.iteration, r.seeds, r.gt_return_mean, r.gt_return_min, r.gt_return_max, r.success_rate_mean
                    );
                }
            }
            Err(e) => println!("{label}: {e}"),
        }
    }
    Ok(())
}
