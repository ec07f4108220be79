use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::rng::mix_seed;

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub master_seed: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64], master_seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var =
            if n > 1 { samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Self { mean, stderr: (var / n as f64).sqrt(), n, master_seed }
    }

    /// Deviation from `target` in standard errors.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }
}

/// `sample(mix(master_seed, i))` for `i < n`, evaluated in parallel and
/// returned in path order.
pub fn run_paths<F>(n: usize, master_seed: u64, sample: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync,
{
    use rayon::prelude::*;
    (0..n as u64).into_par_iter().map(|i| sample(mix_seed(master_seed, i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|estimate - target| <= tol`.
    Absolute(f64),
    /// `|estimate - target| <= tol * |target|`.
    Relative(f64),
    /// `|estimate - target| <= k * stderr`.
    Stderr(f64),
    /// `estimate <= tol`, for distances and residuals.
    Below(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub target: f64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub n: Option<usize>,
    pub tolerance: Tolerance,
    pub pass: bool,
    pub provenance: String,
    #[serde(skip)]
    pub runtime: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, target: f64, estimate: f64, tolerance: Tolerance) -> Self {
        let mut c = Self {
            name: name.into(),
            target,
            estimate,
            stderr: None,
            n: None,
            tolerance,
            pass: false,
            provenance: String::new(),
            runtime: 0.0,
        };
        c.pass = c.evaluate();
        c
    }

    pub fn mc(name: impl Into<String>, target: f64, est: &McEstimate, tolerance: Tolerance) -> Self {
        let mut c = Self::new(name, target, est.mean, Tolerance::Absolute(0.0));
        c.stderr = Some(est.stderr);
        c.n = Some(est.n);
        c.tolerance = tolerance;
        c.pass = c.evaluate();
        c
    }

    /// A distance or residual that must stay below `tol`.
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::new(name, 0.0, value, Tolerance::Below(tol))
    }

    /// A check that could not be computed.
    pub fn failed(name: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut c = Self::new(name, f64::NAN, f64::NAN, Tolerance::Absolute(0.0));
        c.provenance = reason.into();
        c
    }

    pub fn from(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    fn evaluate(&self) -> bool {
        let d = (self.estimate - self.target).abs();
        match self.tolerance {
            Tolerance::Absolute(t) => d <= t,
            Tolerance::Relative(t) => d <= t * self.target.abs(),
            Tolerance::Stderr(k) => self.stderr.is_some_and(|s| d <= k * s),
            Tolerance::Below(t) => self.estimate <= t,
        }
    }
}

/// Named checks, kept sorted by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn push(&mut self, check: Check) {
        let at = self.checks.partition_point(|c| c.name <= check.name);
        self.checks.insert(at, check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The deterministic part of the report: every check without timings.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.checks).expect("checks serialize")
    }

    /// Full JSON document with the pass flag and runtimes.
    pub fn to_json(&self) -> String {
        let timing: serde_json::Map<String, serde_json::Value> =
            self.checks.iter().map(|c| (c.name.clone(), serde_json::json!(c.runtime))).collect();
        let doc = serde_json::json!({
            "pass": self.pass(),
            "checks": self.checks,
            "runtime_seconds": timing,
        });
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>14}  {:>14}  {:>11}  {:<18}  {:>8}  result",
            "check", "target", "estimate", "stderr", "tolerance", "seconds"
        );
        for c in &self.checks {
            let stderr = c.stderr.map(|s| format!("{s:.3e}")).unwrap_or_else(|| "-".into());
            let tol = match c.tolerance {
                Tolerance::Absolute(t) => format!("abs {t:.1e}"),
                Tolerance::Relative(t) => format!("rel {t:.1e}"),
                Tolerance::Stderr(k) => format!("{k} stderr"),
                Tolerance::Below(t) => format!("below {t:.1e}"),
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.6e}  {:>14.6e}  {:>11}  {:<18}  {:>8.2}  {}",
                c.name,
                c.target,
                c.estimate,
                stderr,
                tol,
                c.runtime,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}
