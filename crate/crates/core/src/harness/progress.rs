use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One line of `progress.csv`. Empty cells mean "not measured this
/// iteration".
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProgressRow {
    pub iteration: u64,
    pub target_steps: u64,
    pub source_steps: u64,
    pub disc_loss: Option<f64>,
    pub classifier_loss: Option<f64>,
    pub mean_dd: Option<f64>,
    pub policy_entropy: Option<f64>,
    pub gt_return: Option<f64>,
    pub success_rate: Option<f64>,
}

/// Appends rows to a CSV file, flushing after each one.
pub struct ProgressWriter {
    out: csv::Writer<File>,
}

impl ProgressWriter {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(Self {
            out: csv::Writer::from_path(path)?,
        })
    }

    pub fn write(&mut self, row: &ProgressRow) -> Result<()> {
        self.out.serialize(row)?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_progress(path: &Path) -> Result<Vec<ProgressRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for r in reader.deserialize() {
        rows.push(r?);
    }
    Ok(rows)
}

/// Per-method, per-iteration band over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub iteration: u64,
    pub seeds: usize,
    pub target_steps_mean: f64,
    pub gt_return_mean: f64,
    pub gt_return_min: f64,
    pub gt_return_max: f64,
    pub success_rate_mean: f64,
}

/// A finished run: its method label and progress rows.
#[derive(Clone, Debug)]
pub struct RunLog {
    pub dir: PathBuf,
    pub method: String,
    pub rows: Vec<ProgressRow>,
}

impl RunLog {
    /// Reads `progress.csv` and the method from `summary.json` (falling back
    /// to the directory name's parent).
    pub fn load(dir: &Path) -> Result<Self> {
        let rows = read_progress(&dir.join("progress.csv"))?;
        let method = match std::fs::read_to_string(dir.join("summary.json")) {
            Ok(text) => {
                let v: serde_json::Value = serde_json::from_str(&text)?;
                v["label"]
                    .as_str()
                    .or(v["method"].as_str())
                    .unwrap_or("unknown")
                    .to_string()
            }
            Err(_) => dir
                .parent()
                .and_then(|p| p.file_name())
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "unknown".into()),
        };
        Ok(Self {
            dir: dir.to_owned(),
            method,
            rows,
        })
    }

    /// Rows carrying an evaluation.
    pub fn evaluations(&self) -> impl Iterator<Item = &ProgressRow> {
        self.rows.iter().filter(|r| r.gt_return.is_some())
    }
}

/// Mean/min/max ground-truth return across the runs of each method at
/// every evaluation iteration. Runs of one method must share their
/// evaluation grid.
pub fn aggregate(runs: &[RunLog]) -> Result<Vec<SummaryRow>> {
    if runs.is_empty() {
        return Err(Error::Missing("no runs to aggregate".into()));
    }
    let mut by_method: BTreeMap<&str, Vec<&RunLog>> = BTreeMap::new();
    for r in runs {
        by_method.entry(r.method.as_str()).or_default().push(r);
    }
    let mut out = Vec::new();
    for (method, group) in by_method {
        let grid: Vec<u64> = group[0].evaluations().map(|r| r.iteration).collect();
        for run in &group[1..] {
            let other: Vec<u64> = run.evaluations().map(|r| r.iteration).collect();
            if other != grid {
                return Err(Error::Config(format!(
                    "evaluation grids differ between {} and {} for method {method}",
                    group[0].dir.display(),
                    run.dir.display()
                )));
            }
        }
        let evals: Vec<Vec<&ProgressRow>> = group.iter().map(|r| r.evaluations().collect()).collect();
        for (k, &iteration) in grid.iter().enumerate() {
            let rows: Vec<&ProgressRow> = evals.iter().map(|e| e[k]).collect();
            let n = rows.len() as f64;
            let returns: Vec<f64> = rows.iter().map(|r| r.gt_return.unwrap_or(f64::NAN)).collect();
            out.push(SummaryRow {
                method: method.to_string(),
                iteration,
                seeds: rows.len(),
                target_steps_mean: rows.iter().map(|r| r.target_steps as f64).sum::<f64>() / n,
                gt_return_mean: returns.iter().sum::<f64>() / n,
                gt_return_min: returns.iter().cloned().fold(f64::INFINITY, f64::min),
                gt_return_max: returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                success_rate_mean: rows.iter().map(|r| r.success_rate.unwrap_or(0.0)).sum::<f64>() / n,
            });
        }
    }
    Ok(out)
}

pub fn write_summary<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(method: &str, returns: &[(u64, f64)]) -> RunLog {
        let mut rows = Vec::new();
        for &(it, g) in returns {
            rows.push(ProgressRow {
                iteration: it - 1,
                ..ProgressRow::default()
            });
            rows.push(ProgressRow {
                iteration: it,
                gt_return: Some(g),
                success_rate: Some(0.5),
                ..ProgressRow::default()
            });
        }
        RunLog {
            dir: PathBuf::from(method),
            method: method.into(),
            rows,
        }
    }

    #[test]
    fn single_seed_band_collapses() {
        let s = aggregate(&[run("a", &[(10, -3.0), (20, -2.0)])]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|r| r.gt_return_min == r.gt_return_mean && r.gt_return_max == r.gt_return_mean));
    }

    #[test]
    fn constant_seeds_collapse_to_constant() {
        let runs: Vec<_> = (0..3).map(|_| run("a", &[(10, -1.5), (20, -1.5)])).collect();
        for r in aggregate(&runs).unwrap() {
            assert_eq!((r.gt_return_min, r.gt_return_mean, r.gt_return_max), (-1.5, -1.5, -1.5));
            assert_eq!(r.seeds, 3);
        }
    }

    #[test]
    fn mismatched_grids_rejected() {
        let runs = [run("a", &[(10, 0.0)]), run("a", &[(20, 0.0)])];
        assert!(aggregate(&runs).is_err());
    }

    #[test]
    fn csv_round_trip_keeps_empty_cells() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("progress.csv");
        let rows = run("a", &[(10, -0.1)]).rows;
        let mut w = ProgressWriter::create(&path).unwrap();
        for r in &rows {
            w.write(r).unwrap();
        }
        drop(w);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "iteration,target_steps,source_steps,disc_loss,classifier_loss,mean_dd,policy_entropy,gt_return,success_rate\n"
        ));
        assert_eq!(read_progress(&path).unwrap(), rows);
    }
}
