use super::stepper::HalfLine;
use super::ReflectedTrace;
use crate::error::Result;
use crate::model::BoundaryModel;

/// How a streamed path left a band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    /// Reached `level` at `time`; `local_time` is the local time at the
    /// origin at that moment, on the process clock.
    Crossed { time: f64, level: f64, local_time: f64 },
    /// Killed inside the band.
    Died { time: f64, local_time: f64 },
    /// Still inside the band at the horizon.
    Censored { local_time: f64 },
}

impl Exit {
    pub fn time(&self) -> Option<f64> {
        match *self {
            Exit::Crossed { time, .. } | Exit::Died { time, .. } => Some(time),
            Exit::Censored { .. } => None,
        }
    }

    pub fn local_time(&self) -> f64 {
        match *self {
            Exit::Crossed { local_time, .. } | Exit::Died { local_time, .. } | Exit::Censored { local_time } => {
                local_time
            }
        }
    }

    pub fn crossed(&self, at: f64) -> bool {
        matches!(*self, Exit::Crossed { level, .. } if level == at)
    }
}

/// Runs `model` from `start` until it leaves `(lower, upper)`, dies, or
/// reaches `t_max`. A missing bound is never crossed.
///
/// Knot crossings are placed by linear interpolation. With `bridge` set, a
/// step whose endpoints both stay inside can still cross, with the
/// Brownian-bridge probability, and the crossing is placed at the step
/// midpoint.
#[allow(clippy::too_many_arguments)]
pub fn first_exit(
    model: &BoundaryModel,
    start: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    dt: f64,
    t_max: f64,
    seed: u64,
    bridge: bool,
) -> Result<Exit> {
    let mut hl = HalfLine::new(model, start, dt, seed)?;
    let levels = [lower, upper];
    if lower.is_some_and(|a| start <= a) || upper.is_some_and(|b| start >= b) {
        let level = if lower.is_some_and(|a| start <= a) { lower } else { upper };
        return Ok(Exit::Crossed { time: 0.0, level: level.unwrap_or(start), local_time: 0.0 });
    }
    let mut prev = hl.current();
    while prev.time < t_max {
        let next = hl.step();
        if !next.alive {
            let z = hl.lifetime().unwrap_or(next.time);
            return Ok(Exit::Died { time: z, local_time: prev.local_time });
        }
        let (v0, v1) = (prev.value, next.value);
        let mut best: Option<(f64, f64)> = None;
        for level in levels.into_iter().flatten() {
            let (d0, d1) = (v0 - level, v1 - level);
            let t = if d0 * d1 <= 0.0 {
                Some(prev.time + dt * d0 / (d0 - d1))
            } else if bridge && hl.crosses(level, v0, v1) {
                Some(prev.time + 0.5 * dt)
            } else {
                None
            };
            if let Some(t) = t {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, level));
                }
            }
        }
        if let Some((time, level)) = best {
            let w = (time - prev.time) / dt;
            let local_time = prev.local_time + w * (next.local_time - prev.local_time);
            return Ok(Exit::Crossed { time, level, local_time });
        }
        prev = next;
    }
    Ok(Exit::Censored { local_time: prev.local_time })
}

/// Exit time of the sticky path from `[0, eps)` read off its reflected path:
/// `H_eps + gamma * L_{H_eps}`.
pub fn sticky_exit_time(reflected: &ReflectedTrace, gamma: f64, eps: f64) -> Option<f64> {
    let h = reflected.hitting_time(eps)?;
    Some(h + gamma * reflected.local_time_at(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Absorption;
    use crate::path::{build_process, TimeGrid};

    #[test]
    fn start_outside_band_exits_immediately() {
        let m = BoundaryModel::reflecting();
        let e = first_exit(&m, 0.5, None, Some(0.4), 1e-3, 1.0, 0, false).unwrap();
        assert_eq!(e, Exit::Crossed { time: 0.0, level: 0.4, local_time: 0.0 });
    }

    #[test]
    fn censored_when_band_is_wide() {
        let m = BoundaryModel::reflecting();
        let e = first_exit(&m, 0.0, None, Some(50.0), 1e-2, 1.0, 3, true).unwrap();
        assert!(matches!(e, Exit::Censored { .. }));
    }

    #[test]
    fn absorbing_never_leaves_after_trap() {
        let m = BoundaryModel::absorbing(Absorption::Stop);
        let e = first_exit(&m, 0.0, None, Some(0.1), 1e-3, 5.0, 1, true).unwrap();
        assert!(matches!(e, Exit::Censored { .. }));
    }

    #[test]
    fn matches_grid_hitting_without_bridge() {
        let m = BoundaryModel::reflecting();
        let grid = TimeGrid::new(2.0, 2000).unwrap();
        for seed in 0..20 {
            let aug = build_process(&m, 0.0, grid, seed).unwrap();
            let e = first_exit(&m, 0.0, None, Some(0.3), grid.dt(), 2.0, seed, false).unwrap();
            match aug.path.hitting_time(0.3) {
                Some(h) => assert!((e.time().unwrap() - h).abs() < 1e-12),
                None => assert!(matches!(e, Exit::Censored { .. })),
            }
        }
    }

    #[test]
    fn sticky_exit_identity_holds_pathwise() {
        let grid = TimeGrid::new(1.0, 10_000).unwrap();
        let m = BoundaryModel::sticky(0.3).unwrap();
        for seed in 0..1000 {
            let s = build_process(&m, 0.0, grid, seed).unwrap();
            let trace = s.reflected.as_ref().unwrap();
            if let (Some(a), Some(b)) = (sticky_exit_time(trace, 0.3, 0.1), s.path.hitting_time(0.1)) {
                assert!((a - b).abs() < 2.0 * grid.dt(), "seed {seed}: {a} vs {b}");
            }
        }
    }
}
