//! Command-line front end.
//!
//! Every option can also come from a config file of `key = value` lines
//! (`#` starts a comment); keys are the long flag names without the dashes.
//! Flags override the file. `WENTZELL_SEED` supplies the seed when neither
//! sets it.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use crate::error::Error;
use crate::interval::build_interval_path;
use crate::kernels::{kernel_table, write_kernel_table, TableKind};
use crate::model::{normalize_wentzell, Absorption, BoundaryModel, Side};
use crate::path::{build_process, PathTable, TimeGrid};
use crate::rng::mix_seed;
use crate::validation::suite::unknown_checks;
use crate::validation::{run_suite, SuiteConfig, ValidationReport};

pub const SEED_ENV: &str = "WENTZELL_SEED";

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CliError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingRequired(String),
    #[error("key `{key}`: cannot use `{value}`, expected {expected}")]
    TypeMismatch { key: String, value: String, expected: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Kernel,
    Resolvent,
    Interval,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Model at the origin (left end for `interval`).
    pub model: BoundaryModel,
    /// Model at the right end for `interval`.
    pub model1: BoundaryModel,
    pub start: f64,
    pub grid: TimeGrid,
    pub n_paths: usize,
    pub seed: u64,
    pub lambda: Option<f64>,
    pub time: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub suite: Vec<String>,
}

#[derive(Parser, Debug, Default)]
#[command(name = "wentzell", version, about = "Brownian motions with Feller-Wentzell boundary conditions")]
struct Flags {
    /// simulate | kernel | resolvent | interval | validate
    command: Option<String>,
    /// Config file of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// reflecting | absorbing | absorbing-kill | elastic | sticky | general | trapkill
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Model at the right end of the interval
    #[arg(long)]
    mode1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    #[arg(long = "t-max", allow_hyphen_values = true)]
    t_max: Option<String>,
    /// Grid steps (simulate, interval) or table rows (kernel, resolvent)
    #[arg(long, allow_hyphen_values = true)]
    steps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    paths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    time: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Comma-separated criteria, `default` or `analytic`
    #[arg(long)]
    suite: Option<String>,
}

const KEYS: [&str; 21] = [
    "command", "mode", "a0", "b0", "c0", "beta", "gamma", "mode1", "beta1", "gamma1", "start", "t-max", "steps",
    "paths", "seed", "lambda", "time", "out", "format", "suite", "config",
];

impl Flags {
    fn entries(self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("command", self.command),
            ("mode", self.mode),
            ("a0", self.a0),
            ("b0", self.b0),
            ("c0", self.c0),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("mode1", self.mode1),
            ("beta1", self.beta1),
            ("gamma1", self.gamma1),
            ("start", self.start),
            ("t-max", self.t_max),
            ("steps", self.steps),
            ("paths", self.paths),
            ("seed", self.seed),
            ("lambda", self.lambda),
            ("time", self.time),
            ("out", self.out),
            ("format", self.format),
            ("suite", self.suite),
        ]
    }
}

/// Parses `key = value` lines.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) || key == "config" {
            return Err(CliError::UnknownKey(k.trim().to_string()));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn parse_flags(argv: &[String]) -> Result<Flags, CliError> {
    Flags::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::UnknownArgument => {
            let arg =
                e.get(clap::error::ContextKind::InvalidArg).map(|v| v.to_string()).unwrap_or_else(|| e.to_string());
            CliError::UnknownKey(arg.trim_start_matches('-').split('=').next().unwrap_or("").to_string())
        }
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Usage(e.to_string()),
        _ => CliError::Usage(e.render().to_string()),
    })
}

/// The config file named by `--config`, if any.
pub fn config_path(argv: &[String]) -> Result<Option<PathBuf>, CliError> {
    Ok(parse_flags(argv)?.config)
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn number(&self, key: &str, check: fn(f64) -> bool, expected: &str) -> Result<Option<f64>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() && check(x) => Ok(Some(x)),
            _ => Err(mismatch(key, v, expected)),
        }
    }

    fn required(&self, key: &str, check: fn(f64) -> bool, expected: &str) -> Result<f64, CliError> {
        self.number(key, check, expected)?.ok_or_else(|| CliError::MissingRequired(key.into()))
    }

    fn count(&self, key: &str) -> Result<Option<usize>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(mismatch(key, v, "a positive integer")),
        }
    }
}

fn mismatch(key: &str, value: &str, expected: &str) -> CliError {
    CliError::TypeMismatch { key: key.into(), value: value.into(), expected: expected.into() }
}

fn positive(x: f64) -> bool {
    x > 0.0
}

fn nonneg(x: f64) -> bool {
    x >= 0.0
}

fn model_from(
    v: &Values,
    mode_key: &str,
    beta_key: &str,
    gamma_key: &str,
    weights: bool,
) -> Result<BoundaryModel, CliError> {
    let beta = || v.required(beta_key, positive, "a positive number");
    let gamma = || v.required(gamma_key, positive, "a positive number");
    let invalid = |key: &str, e: Error| mismatch(key, v.raw(key).unwrap_or(""), &e.to_string());
    if let Some(mode) = v.raw(mode_key) {
        return match mode {
            "reflecting" => Ok(BoundaryModel::reflecting()),
            "absorbing" | "absorbing-stop" => Ok(BoundaryModel::absorbing(Absorption::Stop)),
            "absorbing-kill" => Ok(BoundaryModel::absorbing(Absorption::Kill)),
            "elastic" => BoundaryModel::elastic(beta()?).map_err(|e| invalid(beta_key, e)),
            "sticky" => BoundaryModel::sticky(gamma()?).map_err(|e| invalid(gamma_key, e)),
            "general" => BoundaryModel::general(beta()?, gamma()?).map_err(|e| invalid(beta_key, e)),
            "trapkill" => BoundaryModel::trap_kill(beta()?).map_err(|e| invalid(beta_key, e)),
            other => Err(mismatch(
                mode_key,
                other,
                "one of reflecting, absorbing, absorbing-kill, elastic, sticky, general, trapkill",
            )),
        };
    }
    if weights && ["a0", "b0", "c0"].iter().any(|k| v.raw(k).is_some()) {
        let w = |k: &str| v.number(k, nonneg, "a non-negative number").map(|x| x.unwrap_or(0.0));
        let (a0, b0, c0) = (w("a0")?, w("b0")?, w("c0")?);
        return normalize_wentzell(a0, b0, c0, Side::AtZero).map_err(|e| invalid("a0", e));
    }
    Err(CliError::MissingRequired(mode_key.into()))
}

/// Builds a validated [`RunConfig`] from `argv` (program name first) and the
/// text of an optional config file.
pub fn parse_config(argv: &[String], file: Option<&str>) -> Result<RunConfig, CliError> {
    let flags = parse_flags(argv)?;
    let mut map = match file {
        Some(text) => parse_config_file(text)?,
        None => BTreeMap::new(),
    };
    for (k, v) in flags.entries() {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    }
    let v = Values(map);

    let command = match v.raw("command") {
        Some("simulate") => Command::Simulate,
        Some("kernel") => Command::Kernel,
        Some("resolvent") => Command::Resolvent,
        Some("interval") => Command::Interval,
        Some("validate") => Command::Validate,
        Some(other) => return Err(mismatch("command", other, "simulate, kernel, resolvent, interval or validate")),
        None => return Err(CliError::MissingRequired("command".into())),
    };

    let model = match command {
        Command::Validate => BoundaryModel::reflecting(),
        _ => model_from(&v, "mode", "beta", "gamma", true)?,
    };
    let model1 = match (command, v.raw("mode1")) {
        (Command::Interval, Some(_)) => model_from(&v, "mode1", "beta1", "gamma1", false)?.on_side(Side::AtOne),
        _ => BoundaryModel::reflecting().on_side(Side::AtOne),
    };

    let default_start = if command == Command::Interval { 0.5 } else { 0.0 };
    let start = v.number("start", nonneg, "a non-negative number")?.unwrap_or(default_start);
    if command == Command::Interval && start > 1.0 {
        return Err(mismatch("start", v.raw("start").unwrap_or(""), "a number in [0, 1]"));
    }
    let t_max = v.number("t-max", positive, "a positive number")?.unwrap_or(1.0);
    let default_steps = match command {
        Command::Kernel | Command::Resolvent => 101,
        _ => 1000,
    };
    let steps = v.count("steps")?.unwrap_or(default_steps);
    let grid = TimeGrid::new(t_max, steps).map_err(|e| mismatch("t-max", &t_max.to_string(), &e.to_string()))?;
    let n_paths = v.count("paths")?.unwrap_or(1);

    let env_seed = std::env::var(SEED_ENV).ok();
    let seed = match v.raw("seed").or(env_seed.as_deref()) {
        Some(s) => s.parse::<u64>().map_err(|_| mismatch("seed", s, "an unsigned 64-bit integer"))?,
        None => 0,
    };

    let lambda = v.number("lambda", positive, "a positive number")?;
    let time = v.number("time", positive, "a positive number")?;
    match command {
        Command::Kernel if time.is_none() => return Err(CliError::MissingRequired("time".into())),
        Command::Resolvent if lambda.is_none() => return Err(CliError::MissingRequired("lambda".into())),
        _ => {}
    }

    let format = match v.raw("format") {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(mismatch("format", other, "csv or json")),
    };
    let suite: Vec<String> = v
        .raw("suite")
        .unwrap_or("default")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if command == Command::Validate {
        if let Some(bad) = unknown_checks(&SuiteConfig { checks: suite.clone(), master_seed: seed }).first() {
            return Err(mismatch("suite", bad, "a criterion name, `default` or `analytic`"));
        }
    }

    Ok(RunConfig {
        command,
        model,
        model1,
        start,
        grid,
        n_paths,
        seed,
        lambda,
        time,
        out: v.raw("out").map(PathBuf::from),
        format,
        suite,
    })
}

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io { path: path.display().to_string(), cause: e.to_string() }
}

/// Opens `out`, or standard output when it is `None`.
fn sink(out: Option<&Path>) -> crate::Result<Box<dyn Write>> {
    match out {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn with_io<T>(out: Option<&Path>, r: crate::Result<T>) -> crate::Result<T> {
    r.map_err(|e| match (e, out) {
        (Error::Format(cause), Some(p)) => Error::Io { path: p.display().to_string(), cause },
        (Error::Format(cause), None) => Error::Io { path: "<stdout>".into(), cause },
        (e, _) => e,
    })
}

#[derive(Serialize)]
struct JsonPath {
    seed: u64,
    start: f64,
    lifetime: Option<f64>,
    t: Vec<f64>,
    value: Vec<f64>,
    local_time: Vec<f64>,
    tau: Vec<f64>,
    alive: Vec<bool>,
}

fn simulate(cfg: &RunConfig) -> crate::Result<()> {
    let out = cfg.out.as_deref();
    let tables: Vec<(u64, PathTable)> = (0..cfg.n_paths as u64)
        .map(|i| {
            let seed = if cfg.n_paths == 1 { cfg.seed } else { mix_seed(cfg.seed, i) };
            build_process(&cfg.model, cfg.start, cfg.grid, seed).map(|p| (seed, PathTable::from_augmented(&p)))
        })
        .collect::<crate::Result<_>>()?;
    let mut w = sink(out)?;
    match cfg.format {
        Format::Csv if tables.len() == 1 => with_io(out, tables[0].1.write(&mut w))?,
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            let err = |e: csv::Error| Error::Format(e.to_string());
            let r: crate::Result<()> = (|| {
                csv.write_record(["path", "seed", "t", "value", "local_time", "tau", "alive"]).map_err(err)?;
                for (i, (seed, t)) in tables.iter().enumerate() {
                    for j in 0..t.t.len() {
                        csv.write_record([
                            i.to_string(),
                            seed.to_string(),
                            t.t[j].to_string(),
                            t.value[j].to_string(),
                            t.local_time[j].to_string(),
                            t.tau[j].to_string(),
                            (t.alive[j] as u8).to_string(),
                        ])
                        .map_err(err)?;
                    }
                }
                csv.flush().map_err(|e| Error::Format(e.to_string()))
            })();
            with_io(out, r)?;
        }
        Format::Json => {
            let docs: Vec<JsonPath> = tables
                .into_iter()
                .map(|(seed, t)| JsonPath {
                    seed,
                    start: t.start,
                    lifetime: t.lifetime,
                    t: t.t,
                    value: t.value,
                    local_time: t.local_time,
                    tau: t.tau,
                    alive: t.alive,
                })
                .collect();
            let r = serde_json::to_writer_pretty(&mut w, &docs).map_err(|e| Error::Format(e.to_string()));
            with_io(out, r)?;
        }
    }
    with_io(out, w.flush().map_err(|e| Error::Format(e.to_string())))
}

fn table(cfg: &RunConfig, kind: TableKind) -> crate::Result<()> {
    let scale = match kind {
        TableKind::Transition { t } => t.sqrt(),
        TableKind::Resolvent { lambda } => 1.0 / (2.0 * lambda).sqrt(),
    };
    let top = cfg.start + 8.0 * scale;
    let n = cfg.grid.n_steps.max(2);
    let ys: Vec<f64> = (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect();
    let t = kernel_table(&cfg.model, kind, cfg.start, &ys)?;
    let out = cfg.out.as_deref();
    let mut w = sink(out)?;
    match cfg.format {
        Format::Csv => with_io(out, write_kernel_table(&t, &mut w))?,
        Format::Json => {
            let rows: Vec<_> = t
                .rows
                .iter()
                .map(|r| {
                    serde_json::json!({"t_or_lambda": r.t_or_lambda, "x": r.x, "y": r.y,
                        "density": r.density, "atom0": r.atom0, "atom1": r.atom1})
                })
                .collect();
            let doc = serde_json::json!({"model": t.descriptor, "rows": rows});
            with_io(out, serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Error::Format(e.to_string())))?;
        }
    }
    with_io(out, w.flush().map_err(|e| Error::Format(e.to_string())))
}

fn interval(cfg: &RunConfig) -> crate::Result<()> {
    let rec = build_interval_path(cfg.start, &cfg.model, &cfg.model1, cfg.grid, cfg.seed)?;
    match (&cfg.out, cfg.format) {
        (Some(p), _) => {
            let mut w = sink(Some(p))?;
            with_io(Some(p), rec.write_csv(&mut w))?;
            with_io(Some(p), w.flush().map_err(|e| Error::Format(e.to_string())))?;
            let side = p.with_extension("json");
            let mut w = sink(Some(&side))?;
            with_io(Some(&side), rec.write_sidecar(&mut w))?;
            with_io(Some(&side), w.flush().map_err(|e| Error::Format(e.to_string())))
        }
        (None, Format::Csv) => with_io(None, rec.write_csv(io::stdout().lock())),
        (None, Format::Json) => with_io(None, rec.write_sidecar(io::stdout().lock())),
    }
}

fn status(report: &ValidationReport) -> i32 {
    if report.pass() {
        0
    } else {
        1
    }
}

/// Runs a validated config. Returns 0 on success, 1 when a validation check
/// fails and 2 when the command cannot be carried out.
pub fn execute(cfg: &RunConfig) -> i32 {
    let result = match cfg.command {
        Command::Simulate => simulate(cfg).map(|_| 0),
        Command::Kernel => table(cfg, TableKind::Transition { t: cfg.time.expect("checked when parsing") }).map(|_| 0),
        Command::Resolvent => {
            table(cfg, TableKind::Resolvent { lambda: cfg.lambda.expect("checked when parsing") }).map(|_| 0)
        }
        Command::Interval => interval(cfg).map(|_| 0),
        Command::Validate => {
            let report = run_suite(&SuiteConfig { checks: cfg.suite.clone(), master_seed: cfg.seed });
            print!("{}", report.table());
            let written = match (&cfg.out, cfg.format) {
                (Some(p), _) => std::fs::write(p, report.to_json()).map_err(|e| io_error(p, e)),
                (None, Format::Json) => {
                    println!("{}", report.to_json());
                    Ok(())
                }
                (None, Format::Csv) => Ok(()),
            };
            written.map(|_| status(&report))
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        2
    })
}

/// Parses `argv`, reads the `--config` file if one is named, and executes.
pub fn run(argv: &[String]) -> i32 {
    let parsed = config_path(argv).and_then(|path| {
        let text = match &path {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::Usage(io_error(p, e).to_string()))?),
            None => None,
        };
        parse_config(argv, text.as_deref())
    });
    match parsed {
        Ok(cfg) => execute(&cfg),
        Err(CliError::Usage(msg)) if msg.starts_with("Usage") || msg.contains("Print help") => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::Check;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("wentzell").chain(s.split_whitespace()).map(String::from).collect()
    }

    #[test]
    fn simulate_flags() {
        let c =
            parse_config(&argv("simulate --mode sticky --gamma 1 --t-max 1 --steps 10000 --paths 100 --seed 7"), None)
                .unwrap();
        assert_eq!(c.command, Command::Simulate);
        assert_eq!(c.model, BoundaryModel::sticky(1.0).unwrap());
        assert_eq!(c.grid, TimeGrid::new(1.0, 10_000).unwrap());
        assert_eq!((c.n_paths, c.seed), (100, 7));
    }

    #[test]
    fn negative_gamma_is_a_type_mismatch() {
        let e = parse_config(&argv("simulate --mode sticky --gamma -1"), None).unwrap_err();
        assert!(matches!(e, CliError::TypeMismatch { ref key, .. } if key == "gamma"), "{e:?}");
    }

    #[test]
    fn flags_override_file() {
        let file = "# paths first\nmode = reflecting\npaths = 10 # trailing\n";
        let c = parse_config(&argv("simulate --paths 20"), Some(file)).unwrap();
        assert_eq!(c.n_paths, 20);
        let c = parse_config(&argv("simulate"), Some(file)).unwrap();
        assert_eq!(c.n_paths, 10);
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(
            parse_config(&argv("simulate"), Some("colour = red")).unwrap_err(),
            CliError::UnknownKey("colour".into())
        );
        assert!(
            matches!(parse_config(&argv("simulate --colour red"), None), Err(CliError::UnknownKey(k)) if k == "colour")
        );
        assert_eq!(
            parse_config(&argv("kernel --mode reflecting"), None).unwrap_err(),
            CliError::MissingRequired("time".into())
        );
        assert_eq!(
            parse_config(&argv("simulate --mode elastic"), None).unwrap_err(),
            CliError::MissingRequired("beta".into())
        );
        assert_eq!(parse_config(&argv("simulate"), None).unwrap_err(), CliError::MissingRequired("mode".into()));
        assert!(matches!(parse_config(&argv("simulate --mode reflecting --paths x"), None),
            Err(CliError::TypeMismatch { key, .. }) if key == "paths"));
    }

    #[test]
    fn weights_select_the_mode() {
        let c = parse_config(&argv("simulate --a0 0 --b0 1 --c0 1"), None).unwrap();
        assert_eq!(c.model.mode, BoundaryModel::sticky(1.0).unwrap().mode);
    }

    #[test]
    fn interval_right_model() {
        let c = parse_config(&argv("interval --mode elastic --beta 1 --mode1 sticky --gamma1 2"), None).unwrap();
        assert_eq!(c.model1.mode, BoundaryModel::sticky(2.0).unwrap().mode);
        assert_eq!(c.model1.side(), Side::AtOne);
        assert_eq!(c.start, 0.5);
    }

    #[test]
    fn failed_check_exits_with_one() {
        let mut r = ValidationReport::default();
        r.push(Check::below("ok", 0.0, 1.0));
        assert_eq!(status(&r), 0);
        r.push(Check::below("bad", 2.0, 1.0));
        assert_eq!(status(&r), 1);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(parse_config(&argv("validate --suite bogus"), None),
            Err(CliError::TypeMismatch { key, .. }) if key == "suite"));
    }
}
