use rand::Rng;
use rand_distr::StandardNormal;

use super::{AugmentedPath, SamplePath, TimeGrid};
use crate::error::{Error, Result};
use crate::rng::{self, PathRng, Stream};

/// Bridge-extremum draws are skipped when the crossing probability is below
/// `exp(-SKIP_EXPONENT)`.
const SKIP_EXPONENT: f64 = 40.0;

/// State of the reflected path at one knot of the reflected clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedKnot {
    /// Driving Brownian motion, started at the initial point.
    pub x: f64,
    /// Local time at the origin.
    pub l: f64,
    /// Reflected value `x + l`.
    pub r: f64,
}

/// Step-by-step reflected Brownian motion with local time.
///
/// Before the driving motion first reaches the origin the path is the
/// driving motion itself and `L = 0`. Afterwards `L` is the running maximum
/// of `-X` (Levy's construction), sampled exactly at the knots by drawing
/// the minimum of the Brownian bridge inside each step.
#[derive(Debug, Clone)]
pub struct Reflected {
    dt: f64,
    sqrt_dt: f64,
    eps_flat: f64,
    drive: PathRng,
    bridge: PathRng,
    knot: ReflectedKnot,
}

impl Reflected {
    pub fn new(start: f64, dt: f64, seed: u64) -> Self {
        Self {
            dt,
            sqrt_dt: dt.sqrt(),
            eps_flat: 2.0 * dt.sqrt(),
            drive: rng::stream(seed, Stream::Driving),
            bridge: rng::stream(seed, Stream::Bridge),
            knot: ReflectedKnot { x: start, l: 0.0, r: start },
        }
    }

    pub fn knot(&self) -> ReflectedKnot {
        self.knot
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn step(&mut self) -> ReflectedKnot {
        self.advance(self.dt, self.sqrt_dt)
    }

    /// A step of length `h` instead of the nominal `dt`.
    #[inline]
    pub fn step_by(&mut self, h: f64) -> ReflectedKnot {
        if h == self.dt {
            self.step()
        } else {
            self.advance(h, h.sqrt())
        }
    }

    #[inline(always)]
    fn advance(&mut self, dt: f64, sqrt_dt: f64) -> ReflectedKnot {
        let ReflectedKnot { x: x0, l: l0, r: r0 } = self.knot;
        let z: f64 = self.drive.sample(StandardNormal);
        let x1 = x0 + sqrt_dt * z;
        let knot_l = l0.max(-x1);

        // Bridge minimum m = (x0 + x1 - sqrt((x1 - x0)^2 - 2 dt ln U)) / 2,
        // only needed when it can fall below -l0.
        let b = x1 + l0;
        let mut l1 = knot_l;
        // The minimum falls below -l0 with probability exp(-2 r0 b / dt).
        if b <= 0.0 || r0 * b < 0.5 * SKIP_EXPONENT * dt {
            let exponent = if b <= 0.0 { 0.0 } else { 2.0 * r0 * b / dt };
            let u = rng::open_uniform(&mut self.bridge);
            if b > 0.0 && u >= (-exponent).exp() {
                self.knot = ReflectedKnot { x: x1, l: l1, r: x1 + l1 };
                return self.knot;
            }
            let d = x1 - x0;
            let m = 0.5 * (x0 + x1 - (d * d - 2.0 * dt * u.ln()).sqrt());
            l1 = l1.max(-m);
            // Local time may only grow on steps that touch the flat zone.
            if l1 > knot_l && r0 > self.eps_flat && x1 + l1 > self.eps_flat {
                l1 = knot_l;
            }
        }
        self.knot = ReflectedKnot { x: x1, l: l1, r: x1 + l1 };
        self.knot
    }
}

/// Reflected Brownian motion from `start` with its local time at the origin.
pub fn reflect_with_local_time(start: f64, grid: TimeGrid, seed: u64) -> Result<AugmentedPath> {
    if !(start >= 0.0) {
        return Err(Error::NegativeStart(start));
    }
    let mut st = Reflected::new(start, grid.dt(), seed);
    let n = grid.len();
    let (mut values, mut driving, mut lt) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    values.push(start);
    driving.push(start);
    lt.push(0.0);
    for _ in 0..grid.n_steps {
        let k = st.step();
        values.push(k.r);
        driving.push(k.x);
        lt.push(k.l);
    }
    Ok(AugmentedPath {
        path: SamplePath { grid, values, lifetime: None, start },
        driving,
        local_time: lt,
        time_change: None,
        reflected: None,
    })
}

/// Levy's pair `(M - W, M)` on the knots of a driving path `W` started at 0,
/// with `M` the running maximum over knots only.
pub fn levy_pair(driving: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut m = f64::NEG_INFINITY;
    driving
        .iter()
        .map(|&w| {
            m = m.max(w);
            (m - w, m)
        })
        .unzip()
}

/// Band-crossing estimate of the local time at the origin.
///
/// Counts passages of the reflected path from `eps / 4` up to `eps`, a start
/// at or below `eps / 4` counting as already at the bottom, and weights each
/// by the band width. Knots see a level only after the path has overshot it
/// by about `0.5826 sqrt(dt)`, so the width is widened by that amount at each
/// edge.
pub fn local_time_downcrossing(aug: &AugmentedPath, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return Err(Error::BadEps(eps));
    }
    let low = 0.25 * eps;
    let width = eps - low + 2.0 * KNOT_OVERSHOOT * aug.path.grid.dt().sqrt();
    let values = &aug.path.values;
    let mut below = values.first().is_some_and(|&v| v <= low);
    let mut count = 0u64;
    Ok(values
        .iter()
        .map(|&v| {
            if below && v >= eps {
                below = false;
                count += 1;
            } else if !below && v <= low {
                below = true;
            }
            width * count as f64
        })
        .collect())
}

/// `-zeta(1/2) / sqrt(2 pi)`: mean overshoot of a Gaussian random walk over a
/// level, in units of the step deviation.
const KNOT_OVERSHOOT: f64 = 0.5825971579390106;
