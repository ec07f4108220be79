use serde::{Deserialize, Serialize};

use super::report::{Check, Tolerance};
use crate::error::{Error, Result};
use crate::kernels::transition_measure;
use crate::model::{BoundaryModel, Mode};
use crate::path::{HalfLine, TimeGrid};

/// Where a simulated `X_t` ended up.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Dead,
    Atom,
    Interior(f64),
}

/// Empirical versus analytic law of `X_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureDistance {
    /// L1 distance of bin masses over the interior, overflow bin included.
    pub l1: f64,
    pub atom: f64,
    pub atom_target: f64,
    pub atom_stderr: f64,
    pub death: f64,
    pub death_target: f64,
    pub death_stderr: f64,
    pub n: usize,
}

fn binomial_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

impl MeasureDistance {
    pub fn checks(&self, prefix: &str, l1_tol: f64) -> Vec<Check> {
        let mut atom = Check::new(format!("{prefix}_atom"), self.atom_target, self.atom, Tolerance::Stderr(3.0));
        atom.stderr = Some(self.atom_stderr);
        atom.n = Some(self.n);
        let mut death = Check::new(format!("{prefix}_death"), self.death_target, self.death, Tolerance::Stderr(3.0));
        death.stderr = Some(self.death_stderr);
        death.n = Some(self.n);
        for c in [&mut atom, &mut death] {
            // a zero target with a zero estimate has zero stderr
            c.pass = (c.estimate - c.target).abs() <= 3.0 * c.stderr.unwrap_or(0.0);
        }
        vec![Check::below(format!("{prefix}_l1"), self.l1, l1_tol), atom, death]
    }
}

/// Histogram of `X_t` from `x` over `n_paths` paths against the transition
/// measure, on `bins` equal bins of `[0, x + 8 sqrt(t)]` plus an overflow
/// bin.
///
/// Sticky and general paths count as sitting at the origin below
/// `eps_flat`; the analytic atom is compared with the atom plus the density
/// mass of `[0, eps_flat)`. Trapping modes count only the exact origin.
pub fn empirical_measure_distance(
    model: &BoundaryModel,
    t: f64,
    x: f64,
    n_paths: usize,
    bins: usize,
    grid: TimeGrid,
    seed: u64,
) -> Result<MeasureDistance> {
    if t > grid.t_max * (1.0 + 1e-12) {
        return Err(Error::NonPositiveTime(grid.t_max - t));
    }
    let measure = transition_measure(model, t, x)?;
    let dt = grid.dt();
    let steps = (t / dt).round() as usize;
    let sticky = model.gamma() > 0.0;
    let traps = matches!(model.mode, Mode::Absorbing(_) | Mode::TrapKill { .. });
    let eps = if sticky { grid.eps_flat() } else { 0.0 };

    let cells = super::report::run_paths(n_paths, seed, |s| {
        let mut hl = HalfLine::new(model, x, dt, s).expect("start checked by the measure");
        let mut last = hl.current();
        for _ in 0..steps {
            last = hl.step();
            if !last.alive {
                return f64::NAN;
            }
        }
        last.value
    });

    let top = x + 8.0 * t.sqrt();
    let width = top / bins as f64;
    let mut counts = vec![0usize; bins + 1];
    let (mut atom, mut dead) = (0usize, 0usize);
    for v in cells {
        let cell = if v.is_nan() {
            Cell::Dead
        } else if (traps && v == 0.0) || (sticky && v < eps) {
            Cell::Atom
        } else {
            Cell::Interior(v)
        };
        match cell {
            Cell::Dead => dead += 1,
            Cell::Atom => atom += 1,
            Cell::Interior(v) => counts[((v / width) as usize).min(bins)] += 1,
        }
    }
    let n = n_paths as f64;
    let mut l1 = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        let a = (i as f64 * width).max(eps);
        let b = if i == bins { f64::INFINITY } else { (i + 1) as f64 * width };
        let mass = if b > a { measure.density_mass(a, b) } else { 0.0 };
        l1 += (c as f64 / n - mass).abs();
    }
    let atom_target = measure.atom(0.0) + if eps > 0.0 { measure.density_mass(0.0, eps) } else { 0.0 };
    let death_target = (1.0 - measure.total_mass()).max(0.0);
    Ok(MeasureDistance {
        l1,
        atom: atom as f64 / n,
        atom_target,
        atom_stderr: binomial_stderr(atom_target, n_paths),
        death: dead as f64 / n,
        death_target,
        death_stderr: binomial_stderr(death_target, n_paths),
        n: n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Absorption;

    #[test]
    fn absorbed_from_zero_is_all_atom() {
        let g = TimeGrid::with_step(1.0, 0.01).unwrap();
        let d =
            empirical_measure_distance(&BoundaryModel::absorbing(Absorption::Stop), 1.0, 0.0, 200, 10, g, 1).unwrap();
        assert_eq!(d.atom, 1.0);
        assert!((d.atom_target - 1.0).abs() < 1e-15);
        assert!(d.l1 < 1e-9);
        assert!(d.checks("abs", 0.05).iter().all(|c| c.pass));
    }

    #[test]
    fn reflecting_histogram_is_close() {
        let g = TimeGrid::with_step(1.0, 0.01).unwrap();
        let d = empirical_measure_distance(&BoundaryModel::reflecting(), 1.0, 0.5, 20_000, 20, g, 2).unwrap();
        assert!(d.l1 < 0.05, "{d:?}");
        assert_eq!(d.atom, 0.0);
        assert_eq!(d.death, 0.0);
    }
}
