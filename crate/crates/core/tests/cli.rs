use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wentzell::path::{build_process, PathTable};
use wentzell::{BoundaryModel, TimeGrid};

fn wentzell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wentzell")).args(args).env_remove("WENTZELL_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_table(p: &Path) -> PathTable {
    PathTable::read(fs::File::open(p).unwrap()).unwrap()
}

#[test]
fn absorbing_from_origin_stays_at_zero() {
    let o = wentzell(&["simulate", "--mode", "absorbing", "--t-max", "0.5", "--steps", "50", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let t = PathTable::read(o.stdout.as_slice()).unwrap();
    assert_eq!(t.value.len(), 51);
    assert!(t.value.iter().all(|&v| v == 0.0));
}

#[test]
fn path_file_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = wentzell(&[
        "simulate",
        "--mode",
        "general",
        "--beta",
        "0.7",
        "--gamma",
        "1.3",
        "--start",
        "0.2",
        "--t-max",
        "2",
        "--steps",
        "400",
        "--seed",
        "99",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let file = read_table(&out);
    let m = BoundaryModel::general(0.7, 1.3).unwrap();
    let p = build_process(&m, 0.2, TimeGrid::new(2.0, 400).unwrap(), 99).unwrap();
    let lib = PathTable::from_augmented(&p);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&file.value), bits(&lib.value));
    assert_eq!(bits(&file.local_time), bits(&lib.local_time));
    assert_eq!(bits(&file.tau), bits(&lib.tau));
    assert_eq!(file.alive, lib.alive);
    assert_eq!(file.lifetime.map(f64::to_bits), lib.lifetime.map(f64::to_bits));
}

#[test]
fn seed_from_environment_matches_flag() {
    let args = ["simulate", "--mode", "elastic", "--beta", "1", "--t-max", "1", "--steps", "100"];
    let flag = wentzell(&[&args[..], &["--seed", "1234"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_wentzell")).args(args).env("WENTZELL_SEED", "1234").output().unwrap();
    assert_eq!(flag.status.code(), Some(0));
    assert_eq!(flag.stdout, env.stdout);
    let other = wentzell(&[&args[..], &["--seed", "1235"]].concat());
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# elastic run\ncommand = simulate\nmode = elastic\nbeta = 1\nsteps = 100\nseed = 10\n").unwrap();
    let from_file = wentzell(&["--config", cfg.to_str().unwrap()]);
    let overridden = wentzell(&["--config", cfg.to_str().unwrap(), "--seed", "20"]);
    let direct = wentzell(&["simulate", "--mode", "elastic", "--beta", "1", "--steps", "100", "--seed", "20"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(overridden.stdout, direct.stdout);
    assert_ne!(from_file.stdout, direct.stdout);
}

#[test]
fn config_file_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "command = simulate\nmode = reflecting\nbogus = 1\n").unwrap();
    let o = wentzell(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["simulate"][..],
        &["simulate", "--mode", "sticky", "--gamma", "-1"],
        &["simulate", "--mode", "elastic"],
        &["kernel", "--mode", "reflecting"],
        &["interval", "--start", "1.5", "--mode", "reflecting"],
        &["validate", "--suite", "nonsense"],
        &["launch"],
    ] {
        let o = wentzell(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn help_exits_with_zero() {
    let o = wentzell(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("--mode"));
}

#[test]
fn sticky_kernel_atom() {
    let o = wentzell(&["kernel", "--mode", "sticky", "--gamma", "1", "--time", "1", "--steps", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["t_or_lambda", "x", "y", "density", "atom0", "atom1"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 11);
    let atom: f64 = rows[0][4].parse().unwrap();
    assert!((atom - 0.336204002446341).abs() < 1e-12, "{atom}");
}

#[test]
fn reflecting_resolvent_of_one_integrates_to_inverse_lambda() {
    let o = wentzell(&["resolvent", "--mode", "reflecting", "--lambda", "2", "--start", "0.3", "--steps", "2001"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(o.stdout.as_slice());
    let pts: Vec<(f64, f64)> =
        r.records().map(|rec| rec.unwrap()).map(|rec| (rec[2].parse().unwrap(), rec[3].parse().unwrap())).collect();
    let mass: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
    assert!((mass - 0.5).abs() < 1e-3, "{mass}");
}

#[test]
fn interval_writes_path_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iv.csv");
    let o = wentzell(&[
        "interval",
        "--mode",
        "elastic",
        "--beta",
        "1",
        "--mode1",
        "reflecting",
        "--t-max",
        "3",
        "--steps",
        "3000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out);
    assert!(t.value.iter().zip(&t.alive).filter(|(_, &a)| a).all(|(&v, _)| (0.0..=1.0).contains(&v)));
    let side: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["start"], 0.5);
    assert_eq!(side["model0"], "elastic(beta=1)");
    assert_eq!(side["model1"], "reflecting");
    let s = side["crossovers"].as_array().unwrap();
    assert_eq!(s.len(), side["segment_kinds"].as_array().unwrap().len());
    assert_eq!(side["segment_kinds"][0], "Initial");
}

#[test]
fn analytic_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = wentzell(&["validate", "--suite", "analytic", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c08_laplace_consistency_sticky"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn several_paths_share_one_long_table() {
    let o = wentzell(&["simulate", "--mode", "reflecting", "--steps", "10", "--paths", "3", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(&r.headers().unwrap()[0], "path");
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 33);
    assert_eq!(&rows[32][0], "2");
}
