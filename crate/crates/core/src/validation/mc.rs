use super::report::{run_paths, McEstimate};
use crate::error::{Error, Result};
use crate::interval::IntervalWalker;
use crate::model::BoundaryModel;
use crate::path::{HalfLine, TimeGrid};

/// Fails unless the truncation bound `exp(-lambda t_max) / lambda` is below
/// `tolerance / 10`.
pub fn check_truncation(lambda: f64, t_max: f64, tolerance: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let bound = (-lambda * t_max).exp() / lambda;
    let limit = tolerance / 10.0;
    if bound > limit {
        return Err(Error::GridTooShort { bound, limit });
    }
    Ok(())
}

/// Trapezoid sum of `exp(-lambda t) f(X_t)` over `[0, t_max]`, with the
/// step that contains the lifetime cut at the lifetime.
struct Discounted<'a, F> {
    f: &'a F,
    lambda: f64,
    dt: f64,
    sum: f64,
    prev: f64,
    t: f64,
}

impl<'a, F: Fn(f64) -> f64> Discounted<'a, F> {
    fn new(f: &'a F, lambda: f64, dt: f64, x: f64) -> Self {
        Self { f, lambda, dt, sum: 0.0, prev: f(x), t: 0.0 }
    }

    fn alive(&mut self, t: f64, x: f64) {
        let v = (-self.lambda * t).exp() * (self.f)(x);
        self.sum += 0.5 * self.dt * (self.prev + v);
        self.prev = v;
        self.t = t;
    }

    fn died(&mut self, z: f64) {
        self.sum += (z - self.t).max(0.0) * self.prev;
    }
}

/// Monte Carlo `R_lambda f(x) = E_x int_0^zeta exp(-lambda t) f(X_t) dt` for
/// a half-line model.
#[allow(clippy::too_many_arguments)]
pub fn mc_resolvent<F>(
    model: &BoundaryModel,
    f: F,
    lambda: f64,
    x: f64,
    n_paths: usize,
    grid: TimeGrid,
    master_seed: u64,
    tolerance: f64,
) -> Result<McEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_truncation(lambda, grid.t_max, tolerance)?;
    HalfLine::new(model, x, grid.dt(), 0)?;
    let dt = grid.dt();
    let samples = run_paths(n_paths, master_seed, |seed| {
        let mut hl = HalfLine::new(model, x, dt, seed).expect("start checked");
        let mut acc = Discounted::new(&f, lambda, dt, x);
        if !hl.current().alive {
            return 0.0;
        }
        for _ in 0..grid.n_steps {
            let s = hl.step();
            if !s.alive {
                acc.died(hl.lifetime().unwrap_or(s.time));
                break;
            }
            acc.alive(s.time, s.value);
        }
        acc.sum
    });
    Ok(McEstimate::from_samples(&samples, master_seed))
}

/// Monte Carlo resolvent of the pieced process on `[0, 1]`.
#[allow(clippy::too_many_arguments)]
pub fn mc_interval_resolvent<F>(
    model0: &BoundaryModel,
    model1: &BoundaryModel,
    f: F,
    lambda: f64,
    x: f64,
    n_paths: usize,
    grid: TimeGrid,
    master_seed: u64,
    tolerance: f64,
) -> Result<McEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_truncation(lambda, grid.t_max, tolerance)?;
    IntervalWalker::new(x, model0, model1, grid.dt(), 0)?;
    let dt = grid.dt();
    let samples = run_paths(n_paths, master_seed, |seed| {
        let mut w = IntervalWalker::new(x, model0, model1, dt, seed).expect("start checked");
        let mut acc = Discounted::new(&f, lambda, dt, x);
        if !w.current().alive {
            return 0.0;
        }
        for _ in 0..grid.n_steps {
            let s = w.step();
            if !s.alive {
                acc.died(w.lifetime().unwrap_or(s.time));
                break;
            }
            acc.alive(s.time, s.value);
        }
        acc.sum
    });
    Ok(McEstimate::from_samples(&samples, master_seed))
}
