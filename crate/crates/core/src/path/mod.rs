//! Sample paths of half-line Brownian motions built from one driving
//! Brownian motion.
//!
//! The reflected path and its local time come from the Skorokhod map
//! `R = X + L`, `L_t = max(0, -min_{s<=t} X_s)`, with the minimum inside each
//! grid step drawn from the exact Brownian-bridge law. Sticky paths are time
//! changes of the reflected path, elastic and general paths are killed on the
//! local-time scale.

mod exit;
mod io;
mod kill;
mod reflect;
mod stepper;
mod sticky;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

pub use exit::{first_exit, sticky_exit_time, Exit};
pub use io::{PathTable, PATH_HEADER};
pub use kill::pchaf_kill;
pub use reflect::{levy_pair, local_time_downcrossing, reflect_with_local_time, Reflected, ReflectedKnot};
pub use stepper::{build_process, HalfLine, ProcessSample};
pub use sticky::{sticky_time_change, TimeChange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) || n_steps == 0 {
            return Err(Error::BadGrid { t_max, n_steps });
        }
        Ok(Self { t_max, n_steps })
    }

    /// Grid with step `dt` covering at least `[0, t_max]`.
    pub fn with_step(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::BadGrid { t_max, n_steps: 0 });
        }
        let n = (t_max / dt).round().max(1.0) as usize;
        Self::new(n as f64 * dt, n)
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    /// Number of knots, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Threshold below which a path counts as sitting at the origin.
    pub fn eps_flat(&self) -> f64 {
        2.0 * self.dt().sqrt()
    }
}

/// Path values on a grid. After the lifetime the path is in the cemetery:
/// the stored values are frozen and every accessor reports `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub lifetime: Option<f64>,
    pub start: f64,
}

impl SamplePath {
    pub fn alive_at(&self, t: f64) -> bool {
        self.lifetime.is_none_or(|z| t < z)
    }

    pub fn alive(&self, i: usize) -> bool {
        self.alive_at(self.grid.time(i))
    }

    pub fn value(&self, i: usize) -> Option<f64> {
        self.alive(i).then(|| self.values[i])
    }

    /// Linear interpolation between knots.
    pub fn at(&self, t: f64) -> Option<f64> {
        if t < 0.0 || t > self.grid.t_max || !self.alive_at(t) {
            return None;
        }
        let dt = self.grid.dt();
        let i = ((t / dt).floor() as usize).min(self.grid.n_steps - 1);
        let w = (t - self.grid.time(i)) / dt;
        Some(self.values[i] + w * (self.values[i + 1] - self.values[i]))
    }

    /// First time the piecewise-linear interpolant reaches `level`, if that
    /// happens before the lifetime.
    pub fn hitting_time(&self, level: f64) -> Option<f64> {
        hitting_time(self, level)
    }
}

/// Brownian motion from `start` with independent `N(0, dt)` increments.
///
/// Uses the driving stream of `seed`, so it is the driving motion of every
/// half-line path built from the same seed.
pub fn sample_bm(start: f64, grid: TimeGrid, seed: u64) -> SamplePath {
    let mut rng = rng::stream(seed, Stream::Driving);
    let sd = grid.dt().sqrt();
    let mut x = start;
    let mut values = Vec::with_capacity(grid.len());
    values.push(start);
    for _ in 0..grid.n_steps {
        let z: f64 = rng.sample(StandardNormal);
        x += sd * z;
        values.push(x);
    }
    SamplePath { grid, values, lifetime: None, start }
}

pub fn hitting_time(path: &SamplePath, level: f64) -> Option<f64> {
    let v = &path.values;
    if v[0] == level {
        return Some(0.0);
    }
    let dt = path.grid.dt();
    for i in 1..v.len() {
        let (a, b) = (v[i - 1] - level, v[i] - level);
        if a * b <= 0.0 {
            let t = path.grid.time(i - 1) + dt * a / (a - b);
            return path.alive_at(t).then_some(t);
        }
        if !path.alive(i) {
            break;
        }
    }
    None
}

/// A path together with everything needed to replay its construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPath {
    pub path: SamplePath,
    /// Driving Brownian motion `X` read on the path's own clock.
    pub driving: Vec<f64>,
    /// Local time at the origin on the path's own clock.
    pub local_time: Vec<f64>,
    /// `tau(t)`: reflected-clock time reached at process time `t`.
    pub time_change: Option<Vec<f64>>,
    /// The reflected path behind a time change, on the reflected clock.
    pub reflected: Option<ReflectedTrace>,
}

/// Knots of a reflected path on a possibly non-uniform clock.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReflectedTrace {
    pub times: Vec<f64>,
    pub driving: Vec<f64>,
    pub values: Vec<f64>,
    pub local_time: Vec<f64>,
}

impl ReflectedTrace {
    pub fn push(&mut self, t: f64, k: ReflectedKnot) {
        self.times.push(t);
        self.driving.push(k.x);
        self.values.push(k.r);
        self.local_time.push(k.l);
    }

    /// First time the polyline through the knots reaches `level`.
    pub fn hitting_time(&self, level: f64) -> Option<f64> {
        let v = &self.values;
        if v.first() == Some(&level) {
            return Some(self.times[0]);
        }
        (1..v.len()).find_map(|i| {
            let (a, b) = (v[i - 1] - level, v[i] - level);
            (a * b <= 0.0).then(|| self.times[i - 1] + (self.times[i] - self.times[i - 1]) * a / (a - b))
        })
    }

    /// Local time at reflected time `t`, linear between knots.
    pub fn local_time_at(&self, t: f64) -> f64 {
        let j = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.local_time[j - 1] + w * (self.local_time[j] - self.local_time[j - 1])
    }
}

impl AugmentedPath {
    pub fn grid(&self) -> TimeGrid {
        self.path.grid
    }

    /// Right-continuous inverse of the local time, `inf { t : L_t > r }`.
    pub fn inverse_local_time(&self, r: f64) -> Option<f64> {
        crossing_above(&self.path.grid, &self.local_time, r)
    }
}

/// First interpolated time the nondecreasing array `a` exceeds `level`.
pub(crate) fn crossing_above(grid: &TimeGrid, a: &[f64], level: f64) -> Option<f64> {
    let dt = grid.dt();
    (1..a.len())
        .find(|&i| a[i] > level)
        .map(|i| grid.time(i - 1) + dt * (level - a[i - 1]).max(0.0) / (a[i] - a[i - 1]))
}

/// Probability that a Brownian bridge over a step of length `dt` between
/// `v0` and `v1` touches `level`, given both endpoints are on the same side.
pub fn bridge_cross_prob(level: f64, v0: f64, v1: f64, dt: f64) -> f64 {
    let d0 = level - v0;
    let d1 = level - v1;
    if d0 * d1 <= 0.0 {
        1.0
    } else {
        (-2.0 * d0 * d1 / dt).exp()
    }
}
