//! Replay buffers and demonstration files.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::env::{read_transitions, write_transitions, Domain, EnvSpec, Trajectory, Transition};
use crate::error::{Error, Result};
use crate::rng::Rng64;

/// FIFO ring of transitions from a single domain.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    domain: Domain,
    data: VecDeque<Transition>,
    inserted: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, domain: Domain) -> Self {
        assert!(capacity > 0, "replay buffer capacity must be positive");
        Self {
            capacity,
            domain,
            data: VecDeque::with_capacity(capacity.min(1 << 16)),
            inserted: 0,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Total transitions ever pushed.
    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.data.iter()
    }

    /// Appends a trajectory, evicting the oldest entries past capacity. The
    /// whole trajectory is rejected if any transition has the wrong tag.
    pub fn push(&mut self, trajectory: &[Transition]) -> Result<()> {
        if let Some(t) = trajectory.iter().find(|t| t.domain != self.domain) {
            return Err(Error::TagMismatch {
                expected: self.domain,
                got: t.domain,
            });
        }
        for t in trajectory {
            if self.data.len() == self.capacity {
                self.data.pop_front();
            }
            self.data.push_back(t.clone());
            self.inserted += 1;
        }
        Ok(())
    }

    /// `n` transitions drawn uniformly with replacement.
    pub fn sample(&self, n: usize, rng: &mut Rng64) -> Result<Vec<Transition>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        if self.data.is_empty() {
            return Err(Error::EmptyBatch("sample from empty replay buffer"));
        }
        Ok((0..n)
            .map(|_| self.data[rng.random_range(0..self.data.len())].clone())
            .collect())
    }
}

/// Provenance recorded in the first line of a demonstration file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoMeta {
    pub env_config_hash: String,
    pub expert_seed: u64,
    pub horizon: usize,
    pub state_dim: usize,
    pub action_dim: usize,
}

/// Source-domain expert demonstrations; immutable once built.
#[derive(Clone, Debug)]
pub struct DemoSet {
    trajectories: Vec<Trajectory>,
    flat: Vec<Transition>,
    meta: DemoMeta,
}

/// Short stable hash of a serializable config.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config)?;
    Ok(hex::encode(&Sha256::digest(json.as_bytes())[..8]))
}

impl DemoSet {
    pub fn new(trajectories: Vec<Trajectory>, meta: DemoMeta) -> Result<Self> {
        let flat: Vec<Transition> = trajectories.iter().flatten().cloned().collect();
        if flat.is_empty() {
            return Err(Error::EmptyBatch("demonstration set"));
        }
        if let Some(t) = flat.iter().find(|t| t.domain != Domain::Source) {
            return Err(Error::TagMismatch {
                expected: Domain::Source,
                got: t.domain,
            });
        }
        Ok(Self {
            trajectories,
            flat,
            meta,
        })
    }

    pub fn meta(&self) -> &DemoMeta {
        &self.meta
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.flat
    }

    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// `n` transitions uniformly with replacement.
    pub fn sample(&self, n: usize, rng: &mut Rng64) -> Vec<&Transition> {
        (0..n)
            .map(|_| &self.flat[rng.random_range(0..self.flat.len())])
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "# {}", serde_json::to_string(&self.meta)?)?;
        write_transitions(&mut w, &self.flat, self.meta.state_dim, self.meta.action_dim)?;
        w.flush()?;
        Ok(())
    }

    /// Loads a demonstration file recorded for `spec`. A metadata hash that
    /// differs from `expected_hash` only produces a warning, which is both
    /// logged and returned.
    pub fn load(path: &Path, spec: &EnvSpec, expected_hash: Option<&str>) -> Result<(Self, Vec<String>)> {
        let mut reader = BufReader::new(File::open(path)?);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let json = first.trim_end().strip_prefix('#').map(str::trim).ok_or_else(|| Error::Malformed {
            path: path.to_owned(),
            line: 1,
            message: "missing '# {json}' metadata line".into(),
        })?;
        let meta: DemoMeta = serde_json::from_str(json).map_err(|e| Error::Malformed {
            path: path.to_owned(),
            line: 1,
            message: format!("bad metadata: {e}"),
        })?;
        if meta.state_dim != spec.state_dim || meta.action_dim != spec.action_dim {
            return Err(Error::Malformed {
                path: path.to_owned(),
                line: 1,
                message: format!(
                    "recorded dims ({}, {}) do not match environment ({}, {})",
                    meta.state_dim, meta.action_dim, spec.state_dim, spec.action_dim
                ),
            });
        }
        let mut warnings = Vec::new();
        if let Some(h) = expected_hash {
            if h != meta.env_config_hash {
                let msg = format!(
                    "{}: demos were recorded under env config {} but the current config hashes to {h}",
                    path.display(),
                    meta.env_config_hash
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        // The metadata line has been consumed, so CSV line numbers are offset by one.
        let rows = read_transitions(reader, path, spec.state_dim, spec.action_dim).map_err(|e| match e {
            Error::Malformed { path, line, message } => Error::Malformed {
                path,
                line: line + 1,
                message,
            },
            other => other,
        })?;
        let mut trajectories: Vec<Trajectory> = Vec::new();
        let mut current: Trajectory = Vec::new();
        for row in rows {
            let t = row.transition;
            if t.domain != Domain::Source {
                return Err(Error::Malformed {
                    path: path.to_owned(),
                    line: row.line + 1,
                    message: "demonstrations must be source-tagged".into(),
                });
            }
            let continues = current.last().is_some_and(|prev: &Transition| {
                !prev.done
                    && current.len() < meta.horizon
                    && prev.s_next.iter().zip(&t.s).all(|(a, b)| a.to_bits() == b.to_bits())
            });
            if !continues && !current.is_empty() {
                trajectories.push(std::mem::take(&mut current));
            }
            current.push(t);
        }
        if !current.is_empty() {
            trajectories.push(current);
        }
        Ok((Self::new(trajectories, meta)?, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn tr(x: f64, d: Domain) -> Transition {
        Transition::new(vec![x, 0.0], vec![0.0, 1.0], vec![x + 1.0, 0.0], false, d, -1.0)
    }

    #[test]
    fn fifo_eviction() {
        let mut b = ReplayBuffer::new(5, Domain::Target);
        let traj: Vec<_> = (0..10).map(|i| tr(i as f64, Domain::Target)).collect();
        b.push(&traj).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.inserted(), 10);
        let kept: Vec<f64> = b.iter().map(|t| t.s[0]).collect();
        assert_eq!(kept, vec![5.0, 6.0, 7.0, 8.0, 9.0]);
        b.push(&[]).unwrap();
        assert_eq!(b.len(), 5);
    }

    #[test]
    fn tag_contract() {
        let mut b = ReplayBuffer::new(5, Domain::Target);
        assert!(matches!(b.push(&[tr(0.0, Domain::Source)]), Err(Error::TagMismatch { .. })));
        assert!(b.is_empty());
    }

    #[test]
    fn sampling_edge_cases() {
        let mut b = ReplayBuffer::new(5, Domain::Source);
        let r = &mut rng::from_seed(0);
        assert!(b.sample(0, r).unwrap().is_empty());
        assert!(b.sample(1, r).is_err());
        b.push(&[tr(3.0, Domain::Source)]).unwrap();
        let s = b.sample(4, r).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|t| t.s[0] == 3.0));
    }

    #[test]
    fn identical_seeds_identical_samples() {
        let mut b = ReplayBuffer::new(50, Domain::Source);
        b.push(&(0..50).map(|i| tr(i as f64, Domain::Source)).collect::<Vec<_>>()).unwrap();
        let a = b.sample(20, &mut rng::from_seed(5)).unwrap();
        let c = b.sample(20, &mut rng::from_seed(5)).unwrap();
        assert_eq!(a, c);
    }

    fn demo_set() -> DemoSet {
        let mut r = rng::from_seed(2);
        let mut trajs = Vec::new();
        for k in 0..3 {
            let mut s = vec![0.1 * k as f64, rng::normal(&mut r)];
            let mut traj = Vec::new();
            for step in 0..4 {
                let next = vec![s[0] + rng::normal(&mut r) / 3.0, s[1] * 0.5];
                traj.push(Transition::new(s.clone(), vec![1.0 / 3.0, -0.1], next.clone(), step == 3 && k == 0, Domain::Source, 0.0));
                s = next;
            }
            trajs.push(traj);
        }
        let meta = DemoMeta {
            env_config_hash: "abc".into(),
            expert_seed: 9,
            horizon: 4,
            state_dim: 2,
            action_dim: 2,
        };
        DemoSet::new(trajs, meta).unwrap()
    }

    fn spec() -> EnvSpec {
        EnvSpec {
            state_dim: 2,
            action_dim: 2,
            action_low: vec![-1.0; 2],
            action_high: vec![1.0; 2],
            horizon: 4,
            goal: vec![0.0, 0.0],
        }
    }

    #[test]
    fn demo_round_trip_and_hash_warning() {
        let d = demo_set();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("demos.csv");
        d.save(&path).unwrap();
        let (back, warnings) = DemoSet::load(&path, &spec(), Some("abc")).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back.meta(), d.meta());
        assert_eq!(back.len(), d.len());
        for (a, b) in back.transitions().iter().zip(d.transitions()) {
            assert!(a.same_record(b));
        }
        assert_eq!(back.trajectories().len(), 3);
        let (_, warnings) = DemoSet::load(&path, &spec(), Some("other")).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn wrong_column_count_names_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let meta = demo_set().meta().clone();
        let text = format!(
            "# {}\ns_0,s_1,a_0,a_1,s_next_0,s_next_1,done,domain_tag\n0,0,0,0,0,0,0,source\n0,0,0,0,0,0,source\n",
            serde_json::to_string(&meta).unwrap()
        );
        std::fs::write(&path, text).unwrap();
        match DemoSet::load(&path, &spec(), None) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let wrong_dims = EnvSpec { state_dim: 3, ..spec() };
        assert!(DemoSet::load(&path, &wrong_dims, None).is_err());
    }

    #[test]
    fn demo_set_rejects_target_tags_and_empty() {
        let meta = demo_set().meta().clone();
        assert!(DemoSet::new(vec![vec![]], meta.clone()).is_err());
        assert!(DemoSet::new(vec![vec![tr(0.0, Domain::Target)]], meta).is_err());
    }
}
