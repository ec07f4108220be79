use super::{AugmentedPath, ReflectedTrace, SamplePath};

/// The clock `t -> t + gamma * L_t` of a sticky path, stored on the knots of
/// the reflected grid, and its piecewise-linear inverse `tau`.
#[derive(Debug, Clone)]
pub struct TimeChange {
    times: Vec<f64>,
    clock: Vec<f64>,
}

impl TimeChange {
    pub fn new(times: Vec<f64>, local_time: &[f64], gamma: f64) -> Self {
        let clock = times.iter().zip(local_time).map(|(&t, &l)| t + gamma * l).collect();
        Self { times, clock }
    }

    /// Sticky time reached at reflected knot `j`.
    pub fn clock_at(&self, j: usize) -> f64 {
        self.clock[j]
    }

    /// Index `j` with `clock[j] <= s <= clock[j + 1]` and the interpolation
    /// weight of `s` inside that bracket. `s` must lie in the clock's range.
    pub fn bracket(&self, s: f64, from: usize) -> (usize, f64) {
        let mut j = from;
        while j + 2 < self.clock.len() && self.clock[j + 1] < s {
            j += 1;
        }
        let w = (s - self.clock[j]) / (self.clock[j + 1] - self.clock[j]);
        (j, w)
    }

    /// `tau(s)`, the reflected time at sticky time `s`.
    pub fn inverse(&self, s: f64) -> f64 {
        let (j, w) = self.bracket(s, 0);
        self.times[j] + w * (self.times[j + 1] - self.times[j])
    }
}

/// Slows the reflected path down at the origin: the value at time `t` is the
/// reflected value at `tau(t)`, where `tau` inverts `t + gamma L_t`.
///
/// The new local time is `L_{tau(t)}` and `tau` is stored. A lifetime on the
/// input moves to `zeta + gamma L_zeta`.
pub fn sticky_time_change(aug: &AugmentedPath, gamma: f64) -> AugmentedPath {
    if gamma == 0.0 {
        return aug.clone();
    }
    let grid = aug.path.grid;
    let times: Vec<f64> = (0..grid.len()).map(|i| grid.time(i)).collect();
    let tc = TimeChange::new(times.clone(), &aug.local_time, gamma);
    let r = &aug.path.values;
    let l = &aug.local_time;
    let x = &aug.driving;

    let n = grid.len();
    let (mut values, mut lt, mut tau, mut driving) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut j = 0;
    for &s in &times {
        let (jj, w) = tc.bracket(s, j);
        j = jj;
        tau.push(times[j] + w * (times[j + 1] - times[j]));
        values.push(r[j] + w * (r[j + 1] - r[j]));
        lt.push(l[j] + w * (l[j + 1] - l[j]));
        driving.push(x[j] + w * (x[j + 1] - x[j]));
    }
    let lifetime = aug.path.lifetime.map(|z| {
        let (j, w) = {
            let dt = grid.dt();
            let j = ((z / dt).floor() as usize).min(grid.n_steps - 1);
            (j, (z - times[j]) / dt)
        };
        z + gamma * (l[j] + w * (l[j + 1] - l[j]))
    });
    AugmentedPath {
        path: SamplePath { grid, values, lifetime, start: aug.path.start },
        driving,
        local_time: lt,
        time_change: Some(tau),
        reflected: Some(ReflectedTrace {
            times,
            driving: aug.driving.clone(),
            values: aug.path.values.clone(),
            local_time: aug.local_time.clone(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{reflect_with_local_time, TimeGrid};

    #[test]
    fn zero_stickiness_is_identity() {
        let grid = TimeGrid::new(1.0, 1000).unwrap();
        let aug = reflect_with_local_time(0.0, grid, 11).unwrap();
        let s = sticky_time_change(&aug, 0.0);
        assert_eq!(s.path.values, aug.path.values);
    }

    #[test]
    fn linear_local_time_halves_the_clock() {
        // L_t = t, gamma = 1: tau^{-1}(t) = 2t, so tau(t) = t / 2
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let values: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let lt: Vec<f64> = (0..11).map(|i| grid.time(i)).collect();
        let aug = AugmentedPath {
            path: SamplePath { grid, values: values.clone(), lifetime: None, start: 0.0 },
            driving: values,
            local_time: lt,
            time_change: None,
            reflected: None,
        };
        let s = sticky_time_change(&aug, 1.0);
        let tau = s.time_change.unwrap();
        for (i, s) in tau.iter().enumerate() {
            assert!((s - grid.time(i) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_recovers_knots() {
        let grid = TimeGrid::new(1.0, 5000).unwrap();
        let aug = reflect_with_local_time(0.0, grid, 5).unwrap();
        let times: Vec<f64> = (0..grid.len()).map(|i| grid.time(i)).collect();
        let tc = TimeChange::new(times.clone(), &aug.local_time, 0.7);
        for j in (0..grid.n_steps).step_by(37) {
            assert!((tc.inverse(tc.clock_at(j)) - times[j]).abs() < 1e-12);
        }
    }
}
