use super::reflect::{Reflected, ReflectedKnot};
use super::{bridge_cross_prob, AugmentedPath, ReflectedTrace, SamplePath, TimeGrid};
use crate::error::{Error, Result};
use crate::model::{Absorption, BoundaryModel, Mode};
use crate::rng::{self, PathRng, Stream};

const SKIP_PROB: f64 = 4.248354255291589e-18; // exp(-40)

/// One knot of a half-line process on its own clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSample {
    pub time: f64,
    pub value: f64,
    /// Local time at the origin on the process clock (`L^s` for sticky paths).
    pub local_time: f64,
    /// Reflected-clock time corresponding to `time`.
    pub tau: f64,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy)]
struct Knot {
    t: f64,
    u: f64,
    k: ReflectedKnot,
}

/// Streaming construction of any half-line model, one grid step at a time.
///
/// Produces exactly the values of [`build_process`] with the same seed, but
/// can be stopped early, which is what the Monte Carlo checks and the
/// interval construction need.
///
/// For sticky clocks the reflected path is advanced with variable steps
/// aimed at the next process knot. A step on which the local time does not
/// grow lands exactly on that knot, so away from the origin every process
/// knot is a reflected knot and the increments are exact Gaussian steps.
#[derive(Debug, Clone)]
pub struct HalfLine {
    mode: Mode,
    dt: f64,
    gamma: f64,
    index: usize,
    refl: Reflected,
    prev: Knot,
    cur: Knot,
    threshold: Option<f64>,
    hold: f64,
    trapped_at: Option<f64>,
    lifetime: Option<f64>,
    last: ProcessSample,
    last_x: f64,
    crossing: PathRng,
    history: Option<ReflectedTrace>,
}

impl HalfLine {
    pub fn new(model: &BoundaryModel, start: f64, dt: f64, seed: u64) -> Result<Self> {
        if !(start >= 0.0 && start.is_finite()) {
            return Err(Error::StartOutOfRange { start, space: "[0, inf)" });
        }
        let mode = model.mode;
        let refl = Reflected::new(start, dt, seed);
        let first = Knot { t: 0.0, u: 0.0, k: refl.knot() };
        let threshold = match mode {
            Mode::Elastic { beta } | Mode::General { beta, .. } => Some(rng::exponential_threshold(seed, beta)),
            _ => None,
        };
        let hold = match mode {
            Mode::TrapKill { beta } => rng::exponential_threshold(seed, beta),
            Mode::Absorbing(Absorption::Kill) => 0.0,
            _ => f64::INFINITY,
        };
        let mut me = Self {
            mode,
            dt,
            gamma: model.gamma(),
            index: 0,
            refl,
            prev: first,
            cur: first,
            threshold,
            hold,
            trapped_at: None,
            lifetime: None,
            last: ProcessSample { time: 0.0, value: start, local_time: 0.0, tau: 0.0, alive: true },
            last_x: start,
            crossing: rng::stream(seed, Stream::Crossing),
            history: None,
        };
        if me.traps() && start == 0.0 {
            me.trap(0.0);
            me.last.alive = me.lifetime.is_none_or(|z| 0.0 < z);
        }
        Ok(me)
    }

    /// Keep every reflected knot so the construction can be replayed.
    pub fn record(mut self) -> Self {
        let mut trace = ReflectedTrace::default();
        trace.push(0.0, self.cur.k);
        self.history = Some(trace);
        self
    }

    pub fn current(&self) -> ProcessSample {
        self.last
    }

    pub fn lifetime(&self) -> Option<f64> {
        self.lifetime
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The recorded reflected knots, if [`HalfLine::record`] was called.
    pub fn trace(&self) -> Option<&ReflectedTrace> {
        self.history.as_ref()
    }

    fn traps(&self) -> bool {
        matches!(self.mode, Mode::Absorbing(_) | Mode::TrapKill { .. })
    }

    fn trap(&mut self, at: f64) {
        self.trapped_at = Some(at);
        if self.hold.is_finite() {
            self.lifetime = Some(at + self.hold);
        }
    }

    fn advance_reflected(&mut self, h: f64, target: f64) {
        self.prev = self.cur;
        let k = self.refl.step_by(h);
        let t = self.prev.t + h;
        let u = if self.gamma == 0.0 || k.l == self.prev.k.l { target } else { t + self.gamma * k.l };
        self.cur = Knot { t, u, k };
        if let Some(h) = self.history.as_mut() {
            h.push(t, k);
        }
    }

    pub fn step(&mut self) -> ProcessSample {
        self.index += 1;
        let s = self.index as f64 * self.dt;
        let s_prev = (self.index - 1) as f64 * self.dt;
        let was_alive = self.last.alive;

        if !was_alive || self.trapped_at.is_some() {
            // dead paths and trapped paths keep their value
            let alive = was_alive && self.lifetime.is_none_or(|z| s < z);
            self.last = ProcessSample { time: s, tau: s, alive, ..self.last };
            return self.last;
        }

        let (value, local_time, tau, x) = if self.gamma == 0.0 {
            self.advance_reflected(self.dt, s);
            let k = self.cur.k;
            (k.r, k.l, s, k.x)
        } else {
            while self.cur.u < s {
                let gap = s - self.cur.u;
                let h = if gap > self.dt * (1.0 - 1e-9) { self.dt } else { gap };
                self.advance_reflected(h, s);
            }
            let (p, c) = (self.prev, self.cur);
            if c.u == s {
                (c.k.r, c.k.l, c.t, c.k.x)
            } else {
                let w = (s - p.u) / (c.u - p.u);
                (
                    p.k.r + w * (c.k.r - p.k.r),
                    p.k.l + w * (c.k.l - p.k.l),
                    p.t + w * (c.t - p.t),
                    p.k.x + w * (c.k.x - p.k.x),
                )
            }
        };

        let mut sample = ProcessSample { time: s, value, local_time, tau, alive: true };
        if self.traps() && local_time > 0.0 {
            // first step that touches the origin
            let (x0, x1) = (self.prev.k.x, self.cur.k.x);
            let hit = if x1 < 0.0 { s_prev + self.dt * x0 / (x0 - x1) } else { s_prev + 0.5 * self.dt };
            self.trap(hit);
            sample.value = 0.0;
            sample.local_time = 0.0;
        } else if let Some(threshold) = self.threshold {
            if local_time > threshold {
                let l0 = self.last.local_time;
                self.lifetime = Some(s_prev + self.dt * (threshold - l0).max(0.0) / (local_time - l0));
            }
        }
        if let Some(z) = self.lifetime {
            if s >= z {
                sample.alive = false;
                sample.value = self.last.value;
            }
        }
        self.last = sample;
        self.last_x = x;
        sample
    }

    /// Whether the path touched `level` during a step from `v0` to `v1`, using
    /// the Brownian-bridge correction when both knots lie on the same side.
    ///
    /// Valid for levels away from the origin, where the process moves like a
    /// free Brownian motion on its own clock.
    pub fn crosses(&mut self, level: f64, v0: f64, v1: f64) -> bool {
        let p = bridge_cross_prob(level, v0, v1, self.dt);
        p == 1.0 || (p > SKIP_PROB && rng::open_uniform(&mut self.crossing) <= p)
    }

    fn finish(mut self, grid: TimeGrid, start: f64) -> AugmentedPath {
        let n = grid.len();
        let mut values = Vec::with_capacity(n);
        let mut lt = Vec::with_capacity(n);
        let mut tau = Vec::with_capacity(n);
        let mut driving = Vec::with_capacity(n);
        values.push(start);
        lt.push(0.0);
        tau.push(0.0);
        driving.push(start);
        for _ in 0..grid.n_steps {
            let s = self.step();
            values.push(s.value);
            lt.push(s.local_time);
            tau.push(s.tau);
            driving.push(self.last_x);
        }
        if self.gamma == 0.0 {
            // the driving motion goes on after a trap or a death
            while self.history.as_ref().is_some_and(|h| h.times.len() < n) {
                self.advance_reflected(self.dt, 0.0);
            }
            let trace = self.history.take().unwrap_or_default();
            driving = trace.driving.into_iter().take(n).collect();
        }
        let timed = self.gamma > 0.0;
        AugmentedPath {
            path: SamplePath { grid, values, lifetime: self.lifetime, start },
            driving,
            local_time: lt,
            time_change: timed.then_some(tau),
            reflected: if timed { self.history.take() } else { None },
        }
    }
}

/// Builds a full path of `model` from `start` on `grid`.
///
/// * reflecting: the reflected path with its local time;
/// * absorbing: the driving motion stopped (or killed) at the origin;
/// * elastic: reflected path killed when `L` exceeds an exponential level;
/// * sticky: reflected path run on the clock `t + gamma L_t`;
/// * general: sticky path killed when `L^s` exceeds an exponential level;
/// * trap-kill: stopped at the origin, then killed after an exponential time.
pub fn build_process(model: &BoundaryModel, start: f64, grid: TimeGrid, seed: u64) -> Result<AugmentedPath> {
    let stepper = HalfLine::new(model, start, grid.dt(), seed)?.record();
    Ok(stepper.finish(grid, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{pchaf_kill, reflect_with_local_time};

    fn grid() -> TimeGrid {
        TimeGrid::new(1.0, 4000).unwrap()
    }

    #[test]
    fn reflecting_matches_reflected_builder() {
        let a = build_process(&BoundaryModel::reflecting(), 0.3, grid(), 17).unwrap();
        let b = reflect_with_local_time(0.3, grid(), 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sticky_far_from_origin_is_reflected() {
        let g = TimeGrid::new(0.01, 100).unwrap();
        let a = build_process(&BoundaryModel::sticky(0.8).unwrap(), 5.0, g, 4).unwrap();
        let b = reflect_with_local_time(5.0, g, 4).unwrap();
        assert_eq!(a.path.values, b.path.values);
        assert_eq!(a.driving, b.driving);
    }

    #[test]
    fn sticky_clock_and_knot_alignment() {
        let m = BoundaryModel::sticky(0.8).unwrap();
        for seed in 0..5 {
            let a = build_process(&m, 0.0, grid(), seed).unwrap();
            let tau = a.time_change.as_ref().unwrap();
            let trace = a.reflected.as_ref().unwrap();
            let knots: std::collections::HashSet<u64> = trace.values.iter().map(|v| v.to_bits()).collect();
            for i in 1..grid().len() {
                assert!((tau[i] + 0.8 * a.local_time[i] - grid().time(i)).abs() < 1e-12);
                assert!(tau[i] > tau[i - 1]);
                if a.local_time[i] == a.local_time[i - 1] {
                    assert!(knots.contains(&a.path.values[i].to_bits()));
                }
            }
            // the array time change of the recorded trace agrees at the knots
            let r = trace.local_time_at(tau[grid().n_steps]);
            assert!((r - a.local_time[grid().n_steps]).abs() < 1e-12);
        }
    }

    #[test]
    fn elastic_matches_array_kill() {
        let m = BoundaryModel::elastic(3.0).unwrap();
        let mut killed = 0;
        for seed in 0..20 {
            let a = build_process(&m, 0.0, grid(), seed).unwrap();
            let r = reflect_with_local_time(0.0, grid(), seed).unwrap();
            let b = pchaf_kill(&r.path, &r.local_time, 3.0, seed).unwrap();
            assert_eq!(a.path.lifetime, b.lifetime);
            assert_eq!(a.path.values, b.values);
            killed += a.path.lifetime.is_some() as usize;
        }
        assert!(killed > 0);
    }

    #[test]
    fn absorbing_from_zero_is_constant() {
        let p = build_process(&BoundaryModel::absorbing(Absorption::Stop), 0.0, grid(), 1).unwrap();
        assert!(p.path.values.iter().all(|&v| v == 0.0));
        assert_eq!(p.path.lifetime, None);
    }

    #[test]
    fn absorbing_sticks_after_hit() {
        let p = build_process(&BoundaryModel::absorbing(Absorption::Stop), 0.05, grid(), 2).unwrap();
        let first_zero = p.path.values.iter().position(|&v| v == 0.0).expect("hits zero by t = 1");
        assert!(p.path.values[first_zero..].iter().all(|&v| v == 0.0));
        assert!(p.path.values[..first_zero].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn trap_kill_holds_then_dies() {
        let m = BoundaryModel::trap_kill(2.0).unwrap();
        let p = build_process(&m, 0.0, TimeGrid::new(20.0, 2000).unwrap(), 3).unwrap();
        let hold = rng::exponential_threshold(3, 2.0);
        assert!((p.path.lifetime.unwrap() - hold).abs() < 1e-12);
        assert!(p.path.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn start_out_of_range() {
        assert!(matches!(
            build_process(&BoundaryModel::reflecting(), -1.0, grid(), 0),
            Err(Error::StartOutOfRange { .. })
        ));
    }
}
