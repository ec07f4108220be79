//! Monte Carlo and numerical checks that tie simulated paths to the
//! closed-form kernels and laws.

mod analytic;
mod mc;
mod measure;
mod report;
mod stats;
pub mod suite;

pub use analytic::{
    boundary_residual_numeric, chapman_kolmogorov_neumann, elastic_forms_gap, first_passage_check, g_limit_gap,
    laplace_consistency,
};
pub use mc::{check_truncation, mc_interval_resolvent, mc_resolvent};
pub use measure::{empirical_measure_distance, MeasureDistance};
pub use report::{run_paths, Check, McEstimate, Tolerance, ValidationReport};
pub use stats::{ks_statistic, ks_two_sample, total_variation};
pub use suite::{run_suite, SuiteConfig};
