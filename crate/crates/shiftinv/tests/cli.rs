use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use shiftinv::commands::{self, GridFlags, RunFlags};
use shiftinv::config::{Format, RunConfig};
use shiftinv::gridfile;
use shiftinv::exit;
use shiftinv_core::genspace::Grid;
use shiftinv_core::registry;

fn shiftinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftinv")).args(args).output().expect("binary runs")
}

fn fast(key: &str) -> RunFlags {
    RunFlags { samples: Some(20_000), deterministic: true, ..RunFlags::for_example(key) }
}

#[test]
fn dilation_command_exit_codes() {
    let out = shiftinv(&["dilation", "--matrix", "[[1,1],[1,-1]]"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d_A: 2"), "{text}");

    assert_eq!(shiftinv(&["dilation", "--matrix", "[[2,0],[0,1]]"]).status.code(), Some(1));

    let out = commands::dilation("[[3]]", Format::Json).unwrap();
    assert_eq!(out.code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["digits"], serde_json::json!([[0], [1], [2]]));
}

#[test]
fn malformed_matrix_is_an_error() {
    assert!(commands::parse_matrix("[[1,2],[3]]").is_ok());
    assert!(commands::parse_matrix("[[1.5]]").is_err());
    assert!(commands::parse_matrix("nope").is_err());
    assert_eq!(shiftinv(&["dilation", "--matrix", "[[1,2],[3]]"]).status.code(), Some(1));
}

fn table(stdout: &str) -> Vec<Vec<f64>> {
    stdout.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn haar_spectral_table() {
    let out = commands::spectral(&RunFlags::for_example("haar"), &GridFlags::default()).unwrap();
    let rows = table(&out.stdout);
    assert_eq!(rows.len(), 8001);
    assert_eq!(rows[0][0], -4.0);
    assert_eq!(rows[8000][0], 4.0);
    let origin = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((origin[1] - 1.0).abs() < 1e-15);
}

#[test]
fn shannon_and_journe_tables_are_indicators() {
    let grid = GridFlags { lo: Some(-3.0), hi: Some(3.0), step: Some(0.01) };
    let rows = table(&commands::spectral(&RunFlags::for_example("shannon"), &grid).unwrap().stdout);
    for r in &rows {
        let want = if (-0.5..0.5).contains(&r[0]) { 1.0 } else { 0.0 };
        assert_eq!(r[1], want, "shannon at {}", r[0]);
    }
    let k = [(-16.0 / 7.0, -2.0), (-0.5, -2.0 / 7.0), (2.0 / 7.0, 0.5), (2.0, 16.0 / 7.0)];
    let rows = table(&commands::spectral(&RunFlags::for_example("journe"), &grid).unwrap().stdout);
    for r in &rows {
        let want = if k.iter().any(|&(a, b)| a <= r[0] && r[0] <= b) { 1.0 } else { 0.0 };
        assert_eq!(r[1], want, "journe at {}", r[0]);
    }
}

#[test]
fn spectral_grid_flags_reach_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = shiftinv(&[
        "spectral", "-e", "quincunx-shannon", "--lo", "-1", "--hi", "1", "--step", "0.5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let rows = table(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.len() == 3));
}

#[test]
fn config_round_trips_for_every_registry_example() {
    let mut keys: Vec<String> =
        registry::entries().iter().map(|e| e.key.to_string()).filter(|k| k != "bspline:n").collect();
    keys.extend((1..=12).map(|n| format!("bspline:{n}")));
    for key in keys {
        let mut cfg = RunConfig::for_example(&key).unwrap();
        cfg.seed = Some(9);
        cfg.probe.j_max = Some(30);
        cfg.expect = registry::ground_truth(&key, cfg.region.as_deref().unwrap());
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg, "{key}:\n{text}");
        assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }
}

#[test]
fn criteria_exit_codes_follow_labels() {
    assert_eq!(commands::criteria(&fast("haar")).unwrap().code, exit::OK);

    let hardy_all = RunFlags { region: Some("all".into()), ..fast("hardy-shannon") };
    let out = commands::criteria(&hardy_all).unwrap();
    assert_eq!(out.code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["consensus"], "FAIL");
    assert_eq!(v["ground_truth"], "incomplete");

    let mislabeled = RunFlags { expect: Some(registry::GroundTruth::Complete), ..hardy_all };
    assert_eq!(commands::criteria(&mislabeled).unwrap().code, exit::FAILURE);
}

#[test]
fn escaping_support_violates_a_hypothesis() {
    let flags = RunFlags { region: Some("halfspace(-1,0)".into()), ..fast("hardy-shannon") };
    let out = commands::criteria(&flags).unwrap();
    assert_eq!(out.code, exit::HYPOTHESIS_VIOLATED);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["hypothesis_violated"].as_str().unwrap().contains("escapes"));

    let bin = shiftinv(&["criteria", "-e", "hardy-shannon", "-r", "halfspace(-1,0)", "--samples", "20000"]);
    assert_eq!(bin.status.code(), Some(2));
}

#[test]
fn wavelet_examples_are_rejected_by_criteria() {
    assert!(commands::criteria(&fast("journe")).is_err());
    assert!(commands::wavelet(&fast("haar")).is_err());
}

#[test]
fn csv_reports_write_traces_and_a_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("plot.py");
    let flags = RunFlags {
        format: Some(Format::Csv),
        out: Some(dir.path().join("run")),
        plot_script: Some(script.clone()),
        ..fast("shannon")
    };
    assert_eq!(commands::criteria(&flags).unwrap().code, exit::OK);
    let summary = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    assert!(summary.starts_with("criterion_id,verdict,score,tolerance,note"));
    assert_eq!(summary.lines().count(), 10);
    assert!(dir.path().join("run/trace_C3_cesaro.csv").exists());
    assert!(std::fs::read_to_string(script).unwrap().contains("trace_*.csv"));
}

#[test]
fn reports_are_deterministic_in_process() {
    let a = commands::criteria(&fast("shannon")).unwrap().stdout;
    let b = commands::criteria(&fast("shannon")).unwrap().stdout;
    assert_eq!(a, b);
    let timed = RunFlags { deterministic: false, ..fast("shannon") };
    assert!(commands::criteria(&timed).unwrap().stdout.contains("generated_unix"));
}

#[test]
fn seed_flag_changes_the_hash() {
    let a: serde_json::Value = serde_json::from_str(&commands::criteria(&fast("shannon")).unwrap().stdout).unwrap();
    let flags = RunFlags { seed: Some(7), ..fast("shannon") };
    let b: serde_json::Value = serde_json::from_str(&commands::criteria(&flags).unwrap().stdout).unwrap();
    assert_eq!(b["seed"], 7);
    assert_ne!(a["config_hash"], b["config_hash"]);
}

#[test]
fn wavelet_command_verdicts() {
    let out = commands::wavelet(&fast("shannon-wavelet")).unwrap();
    assert_eq!(out.code, exit::OK, "{}", out.stdout);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["calderon"]["verdict"], "PASS");
    assert_eq!(v["decomposition"]["verdict"], "PASS");

    let out = commands::wavelet(&fast("perturbed-shannon-wavelet")).unwrap();
    assert_eq!(out.code, exit::FAILURE);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["calderon"]["verdict"], "FAIL");
}

fn shannon_grid(n: usize) -> Grid {
    Grid::new(vec![-0.5], vec![0.5], vec![n], vec![Complex64::new(1.0, 0.0); n]).unwrap()
}

fn write_config(dir: &Path, grid_name: &str) -> std::path::PathBuf {
    let path = dir.join("custom.toml");
    let text = format!(
        "example = \"custom\"\ndilation = [[2]]\n\n[probe]\nsamples_per_level = 20000\n\n[custom]\nkind = \"scaling\"\ngrid = \"{grid_name}\"\nclaimed_tight_frame = true\n"
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn custom_grid_generators_from_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    gridfile::write_binary(&dir.path().join("g.bin"), &shannon_grid(64)).unwrap();
    gridfile::write_csv(&dir.path().join("g.csv"), &shannon_grid(64)).unwrap();
    for name in ["g.bin", "g.csv"] {
        let loaded = gridfile::load_grid(&dir.path().join(name)).unwrap();
        assert_eq!(loaded, shannon_grid(64), "{name}");
        let flags = RunFlags { config: Some(write_config(dir.path(), name)), deterministic: true, ..Default::default() };
        let out = commands::criteria(&flags).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["consensus"], "PASS", "{name}");
        assert_eq!(out.code, exit::OK);
    }
}

#[test]
fn incomplete_csv_grids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "xi_1,xi_2,re,im\n0,0,1,0\n0.5,0,1,0\n0,0.5,1,0\n").unwrap();
    assert!(gridfile::load_grid(&path).is_err());
    std::fs::write(&path, "xi_1,re,im\n0,1,0\n0.5,1,0\n1.5,1,0\n").unwrap();
    assert!(gridfile::load_grid(&path).is_err());
}

#[test]
fn registry_list_names_every_entry() {
    let out = shiftinv(&["registry", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for e in registry::entries() {
        assert!(text.contains(e.key), "{}", e.key);
    }
}
