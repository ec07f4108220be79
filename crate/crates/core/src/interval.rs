//! Brownian motion on `[0, 1]` pieced together from half-line processes.
//!
//! A free Brownian motion runs from the start until it first hits `{0, 1}`.
//! From then on the path alternates between fresh copies of the half-line
//! process of the left end (started at 0, run until it reaches 1) and
//! mirrored copies of the half-line process of the right end (started at 1,
//! run until it reaches 0). A copy that dies ends the path.
//!
//! Endpoint hits are detected at the knots and, between knots, with the
//! Brownian-bridge crossing probability; a bridge hit is timed at the step
//! midpoint.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BoundaryModel;
use crate::path::{bridge_cross_prob, HalfLine, PathTable, SamplePath, TimeGrid};
use crate::rng::{self, mix_seed, PathRng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    Initial,
    ACopy,
    BCopy,
}

/// One constructed path with its crossover structure.
///
/// `crossovers[k]` is the grid knot at which segment `k` starts and
/// `crossover_times[k]` the interpolated hitting time behind it. Both start
/// with `S_0 = 0`; a path started at an endpoint also has `S_1 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecingRecord {
    pub crossovers: Vec<f64>,
    pub crossover_times: Vec<f64>,
    pub segment_kinds: Vec<SegmentKind>,
    pub start: f64,
    pub path: SamplePath,
    pub model0: BoundaryModel,
    pub model1: BoundaryModel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSample {
    pub time: f64,
    pub value: f64,
    pub alive: bool,
    /// Index `k` of the segment the knot belongs to.
    pub segment: usize,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
enum Segment {
    Initial { rng: PathRng, crossing: PathRng, sd: f64 },
    Copy { kind: SegmentKind, hl: HalfLine },
}

/// Streaming form of [`build_interval_path`].
#[derive(Debug, Clone)]
pub struct IntervalWalker {
    model0: BoundaryModel,
    model1: BoundaryModel,
    dt: f64,
    seed: u64,
    index: usize,
    seg: Segment,
    last: IntervalSample,
    lifetime: Option<f64>,
    crossovers: Vec<f64>,
    crossover_times: Vec<f64>,
    kinds: Vec<SegmentKind>,
}

impl IntervalWalker {
    pub fn new(start: f64, model0: &BoundaryModel, model1: &BoundaryModel, dt: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&start) {
            return Err(Error::StartOutOfRange { start, space: "[0, 1]" });
        }
        let first = mix_seed(seed, 0);
        let initial = Segment::Initial {
            rng: rng::stream(first, Stream::Driving),
            crossing: rng::stream(first, Stream::Crossing),
            sd: dt.sqrt(),
        };
        let mut me = Self {
            model0: *model0,
            model1: *model1,
            dt,
            seed,
            index: 0,
            seg: initial,
            last: IntervalSample { time: 0.0, value: start, alive: true, segment: 0 },
            lifetime: None,
            crossovers: vec![0.0],
            crossover_times: vec![0.0],
            kinds: vec![SegmentKind::Initial],
        };
        if start == 1.0 {
            me.cross(SegmentKind::BCopy, 0.0)?;
        } else if start == 0.0 {
            me.cross(SegmentKind::ACopy, 0.0)?;
        }
        Ok(me)
    }

    pub fn current(&self) -> IntervalSample {
        self.last
    }

    pub fn lifetime(&self) -> Option<f64> {
        self.lifetime
    }

    pub fn crossovers(&self) -> &[f64] {
        &self.crossovers
    }

    pub fn crossover_times(&self) -> &[f64] {
        &self.crossover_times
    }

    pub fn segment_kinds(&self) -> &[SegmentKind] {
        &self.kinds
    }

    /// Starts copy `k = crossovers.len()` at the current knot.
    fn cross(&mut self, kind: SegmentKind, hit: f64) -> Result<()> {
        let k = self.kinds.len();
        let s = self.index as f64 * self.dt;
        let model = if kind == SegmentKind::ACopy { &self.model0 } else { &self.model1 };
        let hl = HalfLine::new(model, 0.0, self.dt, mix_seed(self.seed, k as u64))?;
        self.crossovers.push(s);
        self.crossover_times.push(hit);
        self.kinds.push(kind);
        self.last.value = if kind == SegmentKind::ACopy { 0.0 } else { 1.0 };
        self.last.segment = k;
        if !hl.current().alive {
            self.lifetime = Some(s);
            self.last.alive = false;
        }
        self.seg = Segment::Copy { kind, hl };
        Ok(())
    }

    pub fn step(&mut self) -> IntervalSample {
        let t0 = self.index as f64 * self.dt;
        self.index += 1;
        let t = self.index as f64 * self.dt;
        self.last.time = t;
        if !self.last.alive {
            return self.last;
        }
        let v0 = self.last.value;
        let next = match &mut self.seg {
            Segment::Initial { rng, crossing, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                let v = v0 + *sd * z;
                let mid = t0 + 0.5 * self.dt;
                // ties go to the right end
                if v >= 1.0 {
                    Some((SegmentKind::BCopy, t0 + self.dt * (1.0 - v0) / (v - v0)))
                } else if v <= 0.0 {
                    Some((SegmentKind::ACopy, t0 + self.dt * v0 / (v0 - v)))
                } else if bridge_hits(crossing, 1.0, v0, v, self.dt) {
                    Some((SegmentKind::BCopy, mid))
                } else if bridge_hits(crossing, 0.0, v0, v, self.dt) {
                    Some((SegmentKind::ACopy, mid))
                } else {
                    self.last.value = v;
                    None
                }
            }
            Segment::Copy { kind, hl } => {
                let h0 = hl.current().value;
                let s = hl.step();
                let start = self.crossovers[self.last.segment];
                if !s.alive {
                    self.lifetime = Some(start + hl.lifetime().unwrap_or(s.time));
                    self.last.alive = false;
                    None
                } else if s.value >= 1.0 || hl.crosses(1.0, h0, s.value) {
                    let hit =
                        if s.value >= 1.0 { t0 + self.dt * (1.0 - h0) / (s.value - h0) } else { t0 + 0.5 * self.dt };
                    let other = if *kind == SegmentKind::ACopy { SegmentKind::BCopy } else { SegmentKind::ACopy };
                    Some((other, hit))
                } else {
                    self.last.value = if *kind == SegmentKind::ACopy { s.value } else { 1.0 - s.value };
                    None
                }
            }
        };
        if let Some((kind, hit)) = next {
            // the start is in range, so this cannot fail
            self.cross(kind, hit).expect("copy start 0 is valid");
        }
        self.last
    }

    pub fn finish(mut self, grid: TimeGrid, start: f64) -> PiecingRecord {
        let mut values = Vec::with_capacity(grid.len());
        values.push(self.last.value);
        for _ in 0..grid.n_steps {
            values.push(self.step().value);
        }
        PiecingRecord {
            crossovers: self.crossovers,
            crossover_times: self.crossover_times,
            segment_kinds: self.kinds,
            start,
            path: SamplePath { grid, values, lifetime: self.lifetime, start },
            model0: self.model0,
            model1: self.model1,
        }
    }
}

fn bridge_hits(rng: &mut PathRng, level: f64, v0: f64, v1: f64, dt: f64) -> bool {
    let p = bridge_cross_prob(level, v0, v1, dt);
    p > 1e-18 && rng::open_uniform(rng) <= p
}

/// Builds one interval path from `start` on `grid`, with `model0` at 0 and
/// `model1` at 1.
pub fn build_interval_path(
    start: f64,
    model0: &BoundaryModel,
    model1: &BoundaryModel,
    grid: TimeGrid,
    seed: u64,
) -> Result<PiecingRecord> {
    Ok(IntervalWalker::new(start, model0, model1, grid.dt(), seed)?.finish(grid, start))
}

/// The path stopped at its first visit to `{0, 1}`.
pub fn stopped_at_boundary(record: &PiecingRecord) -> SamplePath {
    let mut path = record.path.clone();
    path.lifetime = None;
    if record.crossovers.len() > 1 {
        let j = (record.crossovers[1] / path.grid.dt()).round() as usize;
        let v = path.values[j];
        path.values[j..].iter_mut().for_each(|x| *x = v);
    }
    path
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    start: f64,
    model0: String,
    model1: String,
    t_max: f64,
    n_steps: usize,
    lifetime: Option<f64>,
    crossovers: Vec<f64>,
    crossover_times: Vec<f64>,
    segment_kinds: Vec<SegmentKind>,
}

impl PiecingRecord {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        PathTable::from_path(&self.path).write(out)
    }

    /// JSON listing the crossovers and segment kinds.
    pub fn write_sidecar<W: Write>(&self, out: W) -> Result<()> {
        let sidecar = Sidecar {
            start: self.start,
            model0: self.model0.descriptor(),
            model1: self.model1.descriptor(),
            t_max: self.path.grid.t_max,
            n_steps: self.path.grid.n_steps,
            lifetime: self.path.lifetime,
            crossovers: self.crossovers.clone(),
            crossover_times: self.crossover_times.clone(),
            segment_kinds: self.segment_kinds.clone(),
        };
        serde_json::to_writer_pretty(out, &sidecar).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::sample_bm;

    fn grid() -> TimeGrid {
        TimeGrid::new(2.0, 2000).unwrap()
    }

    #[test]
    fn start_at_zero_begins_with_a_copy() {
        let r =
            build_interval_path(0.0, &BoundaryModel::reflecting(), &BoundaryModel::reflecting(), grid(), 3).unwrap();
        assert_eq!(r.crossovers[1], 0.0);
        assert_eq!(r.segment_kinds[1], SegmentKind::ACopy);
        let r =
            build_interval_path(1.0, &BoundaryModel::reflecting(), &BoundaryModel::reflecting(), grid(), 3).unwrap();
        assert_eq!(r.segment_kinds[1], SegmentKind::BCopy);
    }

    #[test]
    fn reflecting_paths_stay_inside_and_alternate() {
        let m = BoundaryModel::reflecting();
        for seed in 0..20 {
            let r = build_interval_path(0.3, &m, &m, grid(), seed).unwrap();
            assert!(r.path.lifetime.is_none());
            assert!(r.path.values.iter().all(|v| (0.0..=1.0).contains(v)));
            assert!(r.crossovers.windows(2).skip(1).all(|w| w[0] < w[1]));
            for w in r.segment_kinds.windows(2).skip(1) {
                assert_ne!(w[0], w[1]);
            }
            for (s, h) in r.crossovers.iter().zip(&r.crossover_times) {
                assert!(h <= s && s - h <= 1e-3 + 1e-12);
            }
        }
    }

    #[test]
    fn no_crossover_after_death() {
        let m0 = BoundaryModel::elastic(5.0).unwrap();
        let mut died = 0;
        for seed in 0..30 {
            let r = build_interval_path(0.5, &m0, &BoundaryModel::reflecting(), grid(), seed).unwrap();
            if let Some(z) = r.path.lifetime {
                died += 1;
                assert!(r.crossovers.iter().all(|&s| s <= z));
            }
        }
        assert!(died > 0);
    }

    #[test]
    fn stopped_path_is_stopped_bm() {
        let m = BoundaryModel::sticky(1.0).unwrap();
        for seed in 0..10 {
            let r = build_interval_path(0.5, &m, &m, grid(), seed).unwrap();
            let stopped = stopped_at_boundary(&r);
            let bm = sample_bm(0.5, grid(), mix_seed(seed, 0));
            let j = (r.crossovers[1] / grid().dt()).round() as usize;
            assert_eq!(&stopped.values[..j], &bm.values[..j]);
            let end = stopped.values[j];
            assert!(end == 0.0 || end == 1.0);
            assert!(stopped.values[j..].iter().all(|&v| v == end));
        }
        let r = build_interval_path(0.0, &m, &m, grid(), 1).unwrap();
        assert!(stopped_at_boundary(&r).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn killed_at_the_left_start() {
        let kill = BoundaryModel::absorbing(crate::model::Absorption::Kill);
        let r = build_interval_path(0.0, &kill, &BoundaryModel::reflecting(), grid(), 0).unwrap();
        assert_eq!(r.path.lifetime, Some(0.0));
    }

    #[test]
    fn out_of_range() {
        let m = BoundaryModel::reflecting();
        assert!(matches!(build_interval_path(1.5, &m, &m, grid(), 0), Err(Error::StartOutOfRange { .. })));
    }

    #[test]
    fn sidecar_lists_segments() {
        let m = BoundaryModel::reflecting();
        let r = build_interval_path(0.5, &m, &m, grid(), 9).unwrap();
        let mut buf = Vec::new();
        r.write_sidecar(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["segment_kinds"][0], "Initial");
        assert_eq!(v["crossovers"].as_array().unwrap().len(), r.crossovers.len());
    }
}
