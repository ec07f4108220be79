//! The registered checks: one entry per acceptance criterion, each with its
//! own grid, sample size and derived seed.

use std::time::Instant;

use super::analytic::{
    boundary_residual_numeric, chapman_kolmogorov_neumann, elastic_forms_gap, first_passage_check, g_limit_gap,
    laplace_consistency,
};
use super::mc::mc_interval_resolvent;
use super::measure::empirical_measure_distance;
use super::report::{run_paths, Check, McEstimate, Tolerance, ValidationReport};
use super::stats::{ks_statistic, total_variation};
use crate::error::Result;
use crate::interval::{IntervalWalker, SegmentKind};
use crate::kernels::{interval_resolvent, transition_measure};
use crate::laws;
use crate::model::{Absorption, BoundaryModel};
use crate::path::{build_process, first_exit, HalfLine, Reflected, TimeGrid};
use crate::rng::mix_seed;

const PATHS: usize = 100_000;

#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    /// Criterion names, or `default` for all of them and `analytic` for the
    /// checks without Monte Carlo.
    pub checks: Vec<String>,
    pub master_seed: u64,
}

impl SuiteConfig {
    pub fn default_suite(master_seed: u64) -> Self {
        Self { checks: vec!["default".into()], master_seed }
    }
}

type Criterion = fn(u64) -> Result<Vec<Check>>;

/// Every registered criterion, in order.
pub const CRITERIA: [(&str, Criterion); 10] = [
    ("c01_elastic_survival", elastic_survival),
    ("c02_local_time_at_exit", local_time_at_exit),
    ("c03_inverse_local_time", inverse_local_time),
    ("c04_sticky_exit_time", sticky_exit_time),
    ("c05_kill_time_transforms", kill_time_transforms),
    ("c06_marginal_laws", marginal_laws),
    ("c07_sticky_potential", sticky_potential),
    ("c08_analytic_identities", analytic_identities),
    ("c09_interval_construction", interval_construction),
    ("c10_properties", properties),
];

fn expand(names: &[String]) -> Vec<usize> {
    let mut out = Vec::new();
    for name in names {
        match name.as_str() {
            "default" | "all" => out.extend(0..CRITERIA.len()),
            "analytic" => out.push(7),
            other => {
                if let Some(i) = CRITERIA.iter().position(|(n, _)| *n == other || n.starts_with(&format!("{other}_"))) {
                    out.push(i);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Names in `config.checks` that match no criterion.
pub fn unknown_checks(config: &SuiteConfig) -> Vec<String> {
    config.checks.iter().filter(|n| expand(std::slice::from_ref(n)).is_empty()).cloned().collect()
}

/// Runs one criterion with the seed `mix(master_seed, index)`. Errors become
/// failed checks.
pub fn run_criterion(index: usize, master_seed: u64) -> Vec<Check> {
    let (name, run) = CRITERIA[index];
    let start = Instant::now();
    let mut checks = match run(mix_seed(master_seed, index as u64)) {
        Ok(c) => c,
        Err(e) => vec![Check::failed(name, e.to_string())],
    };
    let secs = start.elapsed().as_secs_f64();
    for c in &mut checks {
        c.runtime = secs;
    }
    checks
}

pub fn run_suite(config: &SuiteConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    for i in expand(&config.checks) {
        report.extend(run_criterion(i, config.master_seed));
    }
    report
}

fn estimate(samples: &[f64], seed: u64) -> McEstimate {
    McEstimate::from_samples(samples, seed)
}

fn elastic_survival(seed: u64) -> Result<Vec<Check>> {
    let m = BoundaryModel::elastic(1.0)?;
    let dt = 1e-4;
    let s = run_paths(PATHS, seed, |s| {
        let e = first_exit(&m, 0.0, None, Some(1.0), dt, f64::INFINITY, s, true).expect("valid start");
        e.crossed(1.0) as u8 as f64
    });
    let target = laws::kill_before_hit_prob(1.0, 1.0);
    Ok(vec![Check::mc("c01_elastic_survival", target, &estimate(&s, seed), Tolerance::Stderr(3.0))
        .from("laws::kill_before_hit_prob(a=1, beta=1)")])
}

fn local_time_at_exit(seed: u64) -> Result<Vec<Check>> {
    let m = BoundaryModel::reflecting();
    let dt = 1e-4;
    let s = run_paths(PATHS, seed, |s| {
        first_exit(&m, 0.0, None, Some(1.0), dt, f64::INFINITY, s, true).expect("valid start").local_time()
    });
    let law = laws::lt_at_exit_law(1.0);
    let mean = law.mean.expect("exponential law has a mean");
    let ks = ks_statistic(&s, |y| law.cdf(y).expect("closed-form cdf"));
    Ok(vec![
        Check::mc("c02_local_time_at_exit_mean", mean, &estimate(&s, seed), Tolerance::Relative(0.02))
            .from("laws::lt_at_exit_law(a=1).mean"),
        Check::below("c02_local_time_at_exit_ks", ks, 0.01).from("KS distance to Exp(mean 1)"),
    ])
}

fn inverse_local_time(seed: u64) -> Result<Vec<Check>> {
    let (dt, horizon, lambda) = (1e-3, 20.0, 0.5);
    let s = run_paths(PATHS, seed, |s| {
        let mut r = Reflected::new(0.0, dt, s);
        let mut t = 0.0;
        let mut l0 = 0.0;
        while t < horizon {
            let k = r.step();
            if k.l > 1.0 {
                let hit = t + dt * (1.0 - l0) / (k.l - l0);
                return (-lambda * hit).exp();
            }
            l0 = k.l;
            t += dt;
        }
        0.0
    });
    let target = laws::k_r_law(1.0).laplace(lambda).expect("closed-form transform");
    Ok(vec![Check::mc("c03_inverse_local_time", target, &estimate(&s, seed), Tolerance::Stderr(3.0))
        .from("laws::k_r_law(r=1) transform at 0.5")])
}

fn sticky_exit_time(seed: u64) -> Result<Vec<Check>> {
    let m = BoundaryModel::sticky(0.3)?;
    let dt = 1e-5;
    let exit = |start: f64, lower: Option<f64>, upper: f64, s: u64| {
        first_exit(&m, start, lower, Some(upper), dt, f64::INFINITY, s, true)
            .expect("valid start")
            .time()
            .expect("exit happens")
    };
    let a = run_paths(PATHS, mix_seed(seed, 0), |s| exit(0.0, None, 0.1, s));
    let b = run_paths(PATHS, mix_seed(seed, 1), |s| exit(0.5, Some(0.4), 0.6, s));
    Ok(vec![
        Check::mc(
            "c04_sticky_exit_time_origin",
            laws::sticky_exit_mean(0.3, 0.1),
            &estimate(&a, seed),
            Tolerance::Relative(0.03),
        )
        .from("laws::sticky_exit_mean(gamma=0.3, eps=0.1)"),
        Check::mc("c04_sticky_exit_time_interior", 0.01, &estimate(&b, seed), Tolerance::Relative(0.03))
            .from("eps^2 for Brownian exit from (x - eps, x + eps)"),
    ])
}

/// `E exp(-lambda zeta)` from `x = 0`, paths followed up to `horizon`.
fn kill_transform(m: &BoundaryModel, lambda: f64, horizon: f64, dt: f64, seed: u64) -> McEstimate {
    let s = run_paths(PATHS, seed, |s| {
        let mut hl = HalfLine::new(m, 0.0, dt, s).expect("valid start");
        while hl.current().time < horizon {
            if !hl.step().alive {
                break;
            }
        }
        hl.lifetime().map_or(0.0, |z| (-lambda * z).exp())
    });
    estimate(&s, seed)
}

fn kill_time_transforms(seed: u64) -> Result<Vec<Check>> {
    let dt = 1e-3;
    let elastic = kill_transform(&BoundaryModel::elastic(1.0)?, 0.5, 30.0, dt, mix_seed(seed, 0));
    let general = kill_transform(&BoundaryModel::general(1.0, 1.0)?, 2.0, 10.0, dt, mix_seed(seed, 1));
    Ok(vec![
        Check::mc("c05_kill_time_transforms_elastic", laws::zeta_lt(1.0, 0.0, 0.5), &elastic, Tolerance::Stderr(3.0))
            .from("laws::zeta_lt(beta=1, gamma=0, lambda=0.5)"),
        Check::mc("c05_kill_time_transforms_general", laws::zeta_lt(1.0, 1.0, 2.0), &general, Tolerance::Stderr(3.0))
            .from("laws::zeta_lt(beta=1, gamma=1, lambda=2)"),
    ])
}

fn marginal_laws(seed: u64) -> Result<Vec<Check>> {
    let grid = TimeGrid::with_step(1.0, 1e-3)?;
    let models = [
        ("reflecting", BoundaryModel::reflecting()),
        ("elastic", BoundaryModel::elastic(1.0)?),
        ("sticky", BoundaryModel::sticky(1.0)?),
        ("general", BoundaryModel::general(1.0, 1.0)?),
    ];
    let mut out = Vec::new();
    for (i, (name, m)) in models.iter().enumerate() {
        for (j, x) in [0.0, 0.5].into_iter().enumerate() {
            let s = mix_seed(seed, (2 * i + j) as u64);
            let d = empirical_measure_distance(m, 1.0, x, PATHS, 50, grid, s)?;
            let prefix = format!("c06_marginal_laws_{name}_x{x}");
            out.extend(d.checks(&prefix, 0.05).into_iter().map(|c| c.from("kernels::transition_measure(t=1)")));
        }
    }
    Ok(out)
}

fn sticky_potential(seed: u64) -> Result<Vec<Check>> {
    let m = BoundaryModel::sticky(1.0)?;
    let (dt, horizon, alpha) = (1e-3, 8.0, 2.0);
    let s = run_paths(PATHS, seed, |s| {
        let mut hl = HalfLine::new(&m, 0.0, dt, s).expect("valid start");
        let mut prev = hl.current();
        let mut acc = 0.0;
        while prev.time < horizon {
            let next = hl.step();
            acc += (-alpha * 0.5 * (prev.time + next.time)).exp() * (next.local_time - prev.local_time);
            prev = next;
        }
        acc
    });
    Ok(vec![Check::mc(
        "c07_sticky_potential",
        laws::ls_alpha_potential(alpha, 1.0, 0.0),
        &estimate(&s, seed),
        Tolerance::Stderr(3.0),
    )
    .from("laws::ls_alpha_potential(alpha=2, gamma=1, x=0)")])
}

fn bump(y: f64) -> f64 {
    (-(y - 0.5) * (y - 0.5) / 0.08).exp()
}

fn analytic_identities(_seed: u64) -> Result<Vec<Check>> {
    let models = [
        ("reflecting", BoundaryModel::reflecting()),
        ("elastic", BoundaryModel::elastic(1.0)?),
        ("sticky", BoundaryModel::sticky(1.0)?),
        ("general", BoundaryModel::general(1.0, 1.0)?),
        ("absorbing_stop", BoundaryModel::absorbing(Absorption::Stop)),
        ("absorbing_kill", BoundaryModel::absorbing(Absorption::Kill)),
        ("trapkill", BoundaryModel::trap_kill(1.0)?),
    ];
    let mut out = Vec::new();
    for (name, m) in &models {
        let gap = [(0.5, 0.8), (0.0, 0.3), (1.2, 0.4)]
            .iter()
            .map(|&(x, y)| laplace_consistency(m, 1.0, x, y))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        out.push(Check::below(format!("c08_laplace_consistency_{name}"), gap, 1e-6));
    }
    let ck = [(0.5, 0.7, 0.3, 1.1), (1.0, 1.0, 0.0, 0.5), (0.2, 2.0, 1.5, 0.1)]
        .iter()
        .map(|&(t, s, x, y)| chapman_kolmogorov_neumann(t, s, x, y))
        .fold(0.0, f64::max);
    out.push(Check::below("c08_chapman_kolmogorov_neumann", ck, 1e-8));
    let norm = 1.0; // sup of the bump
    for (name, m) in &models[..4] {
        let r = boundary_residual_numeric(m, 1.0, bump, 1e-4)?.abs();
        out.push(Check::below(format!("c08_boundary_residual_{name}"), r, 1e-3 * norm));
    }
    for (name, m) in &models[1..4] {
        let r = first_passage_check(m, 1.0, 0.5)?;
        out.push(Check::below(format!("c08_first_passage_{name}"), r, 1e-12));
    }
    out.push(Check::below("c08_elastic_forms", elastic_forms_gap(1.0, 1.0), 1e-13));
    out.push(Check::below("c08_g_limits", g_limit_gap(1.0, 1.0)?, 1e-4));
    Ok(out.into_iter().map(|c| c.from("closed-form kernels")).collect())
}

/// Histogram of the value at `t` on 20 bins of `[0, 1]` plus a cemetery cell.
fn interval_histogram(
    m0: &BoundaryModel,
    m1: &BoundaryModel,
    start: f64,
    steps: usize,
    dt: f64,
    seed: u64,
) -> Vec<Option<f64>> {
    run_paths(PATHS, seed, |s| {
        let mut w = IntervalWalker::new(start, m0, m1, dt, s).expect("valid start");
        for _ in 0..steps {
            w.step();
        }
        let c = w.current();
        if c.alive {
            c.value
        } else {
            f64::NAN
        }
    })
    .into_iter()
    .map(|v| (!v.is_nan()).then_some(v))
    .collect()
}

const BINS: usize = 20;

fn bin(v: Option<f64>) -> usize {
    v.map_or(BINS, |v| ((v * BINS as f64) as usize).min(BINS - 1))
}

fn interval_construction(seed: u64) -> Result<Vec<Check>> {
    let dt = 1e-3;
    let m0 = BoundaryModel::elastic(1.0)?;
    let m1 = BoundaryModel::reflecting();
    let tol = 0.02 * 0.5;
    let exact = interval_resolvent(&m0, &m1, 1.0, |_| 1.0, 0.0)?.value;
    let grid = TimeGrid::with_step(12.0, dt)?;
    let r = mc_interval_resolvent(&m0, &m1, |_| 1.0, 1.0, 0.0, PATHS, grid, mix_seed(seed, 0), tol)?;

    // the first endpoint visit from 0.5
    let hits = run_paths(PATHS, mix_seed(seed, 1), |s| {
        let mut w = IntervalWalker::new(0.5, &m0, &m1, dt, s).expect("valid start");
        while w.segment_kinds().len() < 2 {
            w.step();
        }
        let at_one = w.segment_kinds()[1] == SegmentKind::BCopy;
        if at_one {
            w.crossover_times()[1]
        } else {
            -w.crossover_times()[1]
        }
    });
    let at_one: Vec<f64> = hits.iter().map(|&h| (h > 0.0) as u8 as f64).collect();
    let exit: Vec<f64> = hits.iter().map(|h| h.abs()).collect();

    // X_{t+s} given X_t in the middle bin against X_s from the bin centre
    let (m0, m1) = (BoundaryModel::sticky(1.0)?, BoundaryModel::elastic(1.0)?);
    let steps = (0.5 / dt).round() as usize;
    let cond_bin = BINS / 2;
    let centre = (cond_bin as f64 + 0.5) / BINS as f64;
    let mut conditioned = vec![0usize; BINS + 1];
    let pairs = run_paths(PATHS, mix_seed(seed, 2), |s| {
        let mut w = IntervalWalker::new(0.5, &m0, &m1, dt, s).expect("valid start");
        for _ in 0..steps {
            w.step();
        }
        let first = w.current();
        if !(first.alive && bin(Some(first.value)) == cond_bin) {
            return -1.0;
        }
        for _ in 0..steps {
            w.step();
        }
        let c = w.current();
        bin(c.alive.then_some(c.value)) as f64
    });
    for p in pairs.into_iter().filter(|&p| p >= 0.0) {
        conditioned[p as usize] += 1;
    }
    let mut fresh = vec![0usize; BINS + 1];
    for v in interval_histogram(&m0, &m1, centre, steps, dt, mix_seed(seed, 3)) {
        fresh[bin(v)] += 1;
    }
    let tv = total_variation(&conditioned, &fresh);

    Ok(vec![
        Check::mc("c09_interval_resolvent", exact, &r, Tolerance::Relative(0.02))
            .from("kernels::interval_resolvent(elastic(1), reflecting, lambda=1, f=1, x=0)"),
        Check::mc("c09_gamblers_ruin", 0.5, &estimate(&at_one, seed), Tolerance::Stderr(3.0)).from("x = 0.5"),
        Check::mc("c09_exit_time_mean", 0.25, &estimate(&exit, seed), Tolerance::Relative(0.03)).from("x (1 - x)"),
        Check::below("c09_markov_total_variation", tv, 0.05).from("conditional versus fresh law, 20 bins"),
    ])
}

fn count(flags: impl IntoIterator<Item = bool>) -> f64 {
    flags.into_iter().filter(|&b| b).count() as f64
}

fn properties(seed: u64) -> Result<Vec<Check>> {
    let grid = TimeGrid::new(1.0, 2000)?;
    let models = [
        BoundaryModel::reflecting(),
        BoundaryModel::elastic(1.0)?,
        BoundaryModel::sticky(1.0)?,
        BoundaryModel::general(1.0, 1.0)?,
        BoundaryModel::absorbing(Absorption::Stop),
        BoundaryModel::trap_kill(1.0)?,
    ];
    let seeds: Vec<u64> = (0..200).map(|i| mix_seed(seed, i)).collect();

    let mut replay_failures = 0.0;
    for m in &models {
        for &s in &seeds[..20] {
            replay_failures += (build_process(m, 0.2, grid, s)? != build_process(m, 0.2, grid, s)?) as u8 as f64;
        }
    }

    let eps = grid.eps_flat();
    let mut lt_violations = 0.0;
    for &s in &seeds {
        let p = build_process(&BoundaryModel::reflecting(), 0.0, grid, s)?;
        let (l, r) = (&p.local_time, &p.path.values);
        lt_violations += count((1..l.len()).map(|i| l[i] < l[i - 1] || (l[i] > l[i - 1] && r[i - 1].min(r[i]) > eps)));
    }

    let mut tau_violations = 0.0;
    for m in &models[2..4] {
        for &s in &seeds {
            let p = build_process(m, 0.0, grid, s)?;
            let tau = p.time_change.as_ref().expect("sticky paths carry their clock");
            let alive = |i: usize| p.path.alive(i);
            tau_violations += count((1..tau.len()).map(|i| alive(i) && tau[i] <= tau[i - 1]));
        }
    }

    let betas = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut order_violations = 0.0;
    for &s in &seeds {
        let z: Vec<f64> = betas
            .iter()
            .map(|&b| {
                let m = BoundaryModel::elastic(b).expect("positive rate");
                build_process(&m, 0.0, grid, s).map(|p| p.path.lifetime.unwrap_or(f64::INFINITY))
            })
            .collect::<Result<_>>()?;
        order_violations += count(z.windows(2).map(|w| w[1] > w[0]));
    }

    let mut balance_gap: f64 = 0.0;
    for m in [&models[1], &models[3]] {
        let paths: Vec<_> = seeds.iter().map(|&s| build_process(m, 0.0, grid, s)).collect::<Result<_>>()?;
        for i in (0..grid.len()).step_by(100) {
            let t = grid.time(i);
            let survived = paths.iter().filter(|p| p.path.alive(i)).count();
            let dead = paths.iter().filter(|p| p.path.lifetime.is_some_and(|z| z <= t)).count();
            balance_gap = balance_gap.max(((survived + dead) as f64 / paths.len() as f64 - 1.0).abs());
        }
    }

    let mut mass_gap: f64 = 0.0;
    for m in &models {
        for t in [0.5, 1.0, 2.0] {
            for x in [0.0, 0.7] {
                let total = transition_measure(m, t, x)?.total_mass();
                let gap = if m.is_conservative() { (total - 1.0).abs() } else { (total - 1.0).max(0.0) };
                mass_gap = mass_gap.max(gap);
            }
        }
    }

    Ok(vec![
        Check::below("c10_properties_seed_replay", replay_failures, 0.0).from("paths rebuilt from the same seed"),
        Check::below("c10_properties_local_time_flat", lt_violations, 0.0).from("L nondecreasing, grows only near 0"),
        Check::below("c10_properties_tau_increasing", tau_violations, 0.0).from("sticky clock strictly increasing"),
        Check::below("c10_properties_kill_order", order_violations, 0.0).from("lifetime nonincreasing in beta"),
        Check::below("c10_properties_mass_balance", balance_gap, 0.0)
            .from("survival plus death fraction over a path set"),
        Check::below("c10_properties_kernel_mass", mass_gap, 1e-8).from("transition mass 1 (conservative) or <= 1"),
    ])
}
