use serde::{Deserialize, Serialize};

use super::{Domain, EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::rng::{self, Rng64};
use rand::Rng;

/// Axis-aligned box in the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Self { min, max }
    }

    pub fn center(&self) -> [f64; 2] {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
        ]
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (0..2).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Strict interior test.
    pub fn contains_open(&self, p: &[f64]) -> bool {
        (0..2).all(|i| p[i] > self.min[i] && p[i] < self.max[i])
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        (0..2).all(|i| self.min[i] < other.max[i] && other.min[i] < self.max[i])
    }

    fn is_valid(&self) -> bool {
        (0..2).all(|i| self.min[i] <= self.max[i])
    }
}

/// Point-mass maze in the unit square with one vertical wall hanging from
/// the top edge. The target domain's wall reaches further down.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointMazeConfig {
    pub wall_x: f64,
    pub wall_thickness: f64,
    /// Fraction of the arena height covered by the source-domain wall.
    pub source_wall_length: f64,
    /// Fraction of the arena height covered by the target-domain wall.
    pub target_wall_length: f64,
    pub start_region: Rect,
    pub goal_region: Rect,
    pub goal_radius: f64,
    /// Std of Gaussian noise added to each step's displacement.
    pub noise_std: f64,
    /// Displacement per unit action.
    pub max_step: f64,
    pub horizon: usize,
}

impl Default for PointMazeConfig {
    fn default() -> Self {
        Self {
            wall_x: 0.5,
            wall_thickness: 0.04,
            source_wall_length: 0.5,
            target_wall_length: 0.75,
            start_region: Rect::new([0.15, 0.55], [0.25, 0.65]),
            goal_region: Rect::new([0.7, 0.55], [0.8, 0.65]),
            goal_radius: 0.08,
            noise_std: 0.005,
            max_step: 0.07,
            horizon: 50,
        }
    }
}

impl PointMazeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("pointmaze: {m}")));
        for len in [self.source_wall_length, self.target_wall_length] {
            if !(len > 0.0 && len <= 1.0) {
                return bad("wall lengths must lie in (0, 1]");
            }
        }
        if self.target_wall_length <= self.source_wall_length {
            return bad("target wall must be longer than source wall");
        }
        let half = 0.5 * self.wall_thickness;
        if !(self.wall_thickness > 0.0 && self.wall_x - half > 0.0 && self.wall_x + half < 1.0) {
            return bad("wall must lie strictly inside the arena");
        }
        let target_wall = self.wall_rect(self.target_wall_length);
        for (name, r) in [("start_region", self.start_region), ("goal_region", self.goal_region)] {
            if !r.is_valid() || !(r.min[0] >= 0.0 && r.min[1] >= 0.0 && r.max[0] <= 1.0 && r.max[1] <= 1.0) {
                return bad(&format!("{name} must be a box inside the arena"));
            }
            if r.intersects(&target_wall) {
                return bad(&format!("{name} overlaps the wall"));
            }
        }
        if self.start_region.intersects(&self.goal_region) {
            return bad("start and goal regions overlap");
        }
        if !(self.goal_radius > 0.0 && self.max_step > 0.0 && self.noise_std >= 0.0) {
            return bad("goal_radius and max_step must be positive, noise_std non-negative");
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        Ok(())
    }

    pub fn wall_rect(&self, length: f64) -> Rect {
        let half = 0.5 * self.wall_thickness;
        Rect::new(
            [self.wall_x - half, 1.0 - length],
            [self.wall_x + half, 1.0 + self.wall_thickness],
        )
    }

    pub fn build(&self, domain: Domain) -> Result<PointMaze> {
        self.validate()?;
        let length = match domain {
            Domain::Source => self.source_wall_length,
            Domain::Target => self.target_wall_length,
        };
        let goal = self.goal_region.center();
        Ok(PointMaze {
            spec: EnvSpec {
                state_dim: 2,
                action_dim: 2,
                action_low: vec![-1.0; 2],
                action_high: vec![1.0; 2],
                horizon: self.horizon,
                goal: goal.to_vec(),
            },
            domain,
            wall: self.wall_rect(length),
            config: self.clone(),
        })
    }

    pub fn domain_pair(&self) -> Result<super::DomainPair<super::Env>> {
        super::DomainPair::new(
            super::Env::PointMaze(self.build(Domain::Source)?),
            super::Env::PointMaze(self.build(Domain::Target)?),
        )
    }
}

/// Position-controlled point mass. State is the (x, y) position; actions in
/// [-1, 1]² are scaled by `max_step`. Motion is truncated where the
/// displacement segment first meets the wall or the arena boundary.
#[derive(Clone, Debug)]
pub struct PointMaze {
    spec: EnvSpec,
    domain: Domain,
    wall: Rect,
    config: PointMazeConfig,
}

impl PointMaze {
    pub fn wall(&self) -> Rect {
        self.wall
    }

    pub fn config(&self) -> &PointMazeConfig {
        &self.config
    }

    /// True if `p` lies strictly inside the wall.
    pub fn in_wall(&self, p: &[f64]) -> bool {
        self.wall.contains_open(p)
    }

    /// Fraction of the segment `p + t d` (t in [0, 1]) that can be travelled
    /// before entering the open wall rectangle, plus the axis of the face hit.
    fn wall_hit(&self, p: [f64; 2], d: [f64; 2]) -> Option<(f64, usize)> {
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        let mut axis = 0;
        for i in 0..2 {
            let (lo, hi) = (self.wall.min[i], self.wall.max[i]);
            if d[i] == 0.0 {
                if !(p[i] > lo && p[i] < hi) {
                    return None;
                }
            } else {
                let ta = (lo - p[i]) / d[i];
                let tb = (hi - p[i]) / d[i];
                let (t0, t1) = if ta < tb { (ta, tb) } else { (tb, ta) };
                if t0 > t_enter {
                    t_enter = t0;
                    axis = i;
                }
                t_exit = t_exit.min(t1);
            }
        }
        if t_enter < t_exit && t_exit > 0.0 && t_enter < 1.0 {
            Some((t_enter.max(0.0), axis))
        } else {
            None
        }
    }
}

impl Environment for PointMaze {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn reset(&self, rng: &mut Rng64) -> Vec<f64> {
        let r = &self.config.start_region;
        (0..2)
            .map(|i| r.min[i] + (r.max[i] - r.min[i]) * rng.random::<f64>())
            .collect()
    }

    fn step(&self, state: &[f64], action: &[f64], rng: &mut Rng64) -> Result<(Vec<f64>, bool)> {
        if state.len() != 2 || action.len() != 2 {
            return Err(Error::DimensionMismatch {
                context: "pointmaze step",
                expected: 2,
                got: if state.len() != 2 { state.len() } else { action.len() },
            });
        }
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence("non-finite pointmaze state".into()));
        }
        crate::error::ensure_finite(action, "pointmaze action")?;
        let a = self.spec.clip_action(action);
        let p = [state[0], state[1]];
        let mut d = [0.0; 2];
        for i in 0..2 {
            // Draw noise unconditionally so both domains consume the stream
            // identically.
            let n = rng::normal(rng);
            d[i] = a[i] * self.config.max_step
                + self.config.noise_std * n;
        }

        // Arena boundary: largest t keeping the point in [0, 1]².
        let mut t = 1.0f64;
        for i in 0..2 {
            if d[i] > 0.0 {
                t = t.min((1.0 - p[i]) / d[i]);
            } else if d[i] < 0.0 {
                t = t.min((0.0 - p[i]) / d[i]);
            }
        }
        t = t.max(0.0);
        let mut face = None;
        if let Some((tw, axis)) = self.wall_hit(p, d) {
            if tw <= t {
                t = tw;
                face = Some(axis);
            }
        }
        let mut next = [
            (p[0] + t * d[0]).clamp(0.0, 1.0),
            (p[1] + t * d[1]).clamp(0.0, 1.0),
        ];
        if self.in_wall(&next) {
            // Rounding put us a hair inside; snap onto the face we hit.
            let axis = face.unwrap_or(0);
            next[axis] = if d[axis] > 0.0 {
                self.wall.min[axis]
            } else {
                self.wall.max[axis]
            };
        }
        let next = next.to_vec();
        let done = self.is_success(&next);
        Ok((next, done))
    }

    fn position(&self, state: &[f64]) -> Vec<f64> {
        state[..2].to_vec()
    }

    fn is_success(&self, state: &[f64]) -> bool {
        -self.ground_truth_reward(state) <= self.config.goal_radius
    }
}
