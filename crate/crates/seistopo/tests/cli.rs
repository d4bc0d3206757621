//! End-to-end checks of the `seistopo` binary: subcommand plumbing, error
//! reporting, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_seistopo")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn synth_demo(dir: &Path) -> String {
    let grid = dir.join("demo.sgrd");
    run_ok(&["synth", "--output", grid.to_str().unwrap()]);
    grid.to_str().unwrap().to_owned()
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "synth",
        "despike",
        "migrate",
        "panels",
        "betti",
        "sweep",
        "diffuse",
        "pipeline",
        "import-segy",
        "export-csv",
    ] {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help failed");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn missing_input_fails_with_diagnostic_and_nonzero_exit() {
    let out = run(&["migrate", "--velocity", "1500"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--input"), "stderr: {stderr}");
}

#[test]
fn bad_grid_file_names_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.sgrd");
    std::fs::write(&path, b"XXXXnot a grid").unwrap();
    let out = run(&[
        "betti",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("magic"), "stderr: {stderr}");
}

#[test]
fn betti_prints_label_row() {
    let dir = tempfile::tempdir().unwrap();
    let grid = synth_demo(dir.path());
    // The unmigrated demo is one connected interference pattern riddled
    // with loops (contrast with b1 = 0 once migrated at 1500 m/s).
    let stdout = run_ok(&["betti", "--input", &grid, "--tau", "0.1"]);
    assert_eq!(stdout.trim_end(), "demo,1,871", "stdout: {stdout}");

    let csv = dir.path().join("betti.csv");
    run_ok(&[
        "betti",
        "--input",
        &grid,
        "--tau",
        "0.1",
        "--label",
        "demo-section",
        "--output",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text, "demo-section,1,871\n");
}

#[test]
fn export_csv_round_trips_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let grid = synth_demo(dir.path());
    let csv = dir.path().join("demo.csv");
    run_ok(&["export-csv", "--input", &grid, "--output", csv.to_str().unwrap()]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 512);
    assert_eq!(lines[0].split(',').count(), 256);
}

#[test]
fn despike_and_spike_injection() {
    let dir = tempfile::tempdir().unwrap();
    let spiked = dir.path().join("spiked.sgrd");
    let stdout = run_ok(&[
        "synth",
        "--output",
        spiked.to_str().unwrap(),
        "--spike",
        "100,40",
    ]);
    assert!(stdout.contains("injected spike"), "stdout: {stdout}");
    let cleaned = dir.path().join("cleaned.sgrd");
    run_ok(&[
        "despike",
        "--input",
        spiked.to_str().unwrap(),
        "--output",
        cleaned.to_str().unwrap(),
    ]);
    let section = seistopo::io::read_grid(&cleaned).unwrap();
    assert_eq!(section.at(100, 40), 0.0);
}

#[test]
fn panels_writes_numbered_grids() {
    let dir = tempfile::tempdir().unwrap();
    let grid = synth_demo(dir.path());
    let panels = dir.path().join("panels");
    run_ok(&[
        "panels",
        "--input",
        &grid,
        "--output",
        panels.to_str().unwrap(),
        "--base-v",
        "500",
        "--count",
        "3",
    ]);
    assert!(panels.join("panel_000.sgrd").exists());
    assert!(panels.join("panel_002.sgrd").exists());
    // Panel 0 is the input at f32 precision.
    let p0 = seistopo::io::read_grid(panels.join("panel_000.sgrd")).unwrap();
    let input = seistopo::io::read_grid(&grid).unwrap();
    assert_eq!(p0.samples, input.samples);
}

#[test]
fn pipeline_subcommand_runs_config() {
    let dir = tempfile::tempdir().unwrap();
    let grid = synth_demo(dir.path());
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "[despike]\n\n[sweep]\nv_min = 1300.0\nv_max = 1700.0\nv_step = 100.0\ntau = 0.1\n\n[migrate]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let stdout = run_ok(&[
        "pipeline",
        "--input",
        &grid,
        "--config",
        config.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        stdout.contains("selected velocity: 1500 m/s"),
        "stdout: {stdout}"
    );
    for name in ["despiked.sgrd", "sweep.csv", "sweep.svg", "migrated.sgrd", "report.txt"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    // CSV respects the documented schema, and its b1 column bottoms out at
    // the true velocity row.
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert!(csv.starts_with("velocity_mps,b0,b1,active_pixels\n"));
    assert_eq!(csv.trim_end().lines().count(), 6); // header + 5 velocities
    let min_row = csv
        .trim_end()
        .lines()
        .skip(1)
        .min_by_key(|line| line.split(',').nth(2).unwrap().parse::<usize>().unwrap())
        .unwrap();
    assert!(min_row.starts_with("1500,"), "min b1 row: {min_row}");
}

#[test]
fn pipeline_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let grid = synth_demo(dir.path());
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[sweep]\nv_min = 500.0\nv_max = 600.0\nv_step = 100.0\ntypo_key = 1\n").unwrap();
    let out = run(&[
        "pipeline",
        "--input",
        &grid,
        "--config",
        config.to_str().unwrap(),
        "--output",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("typo_key"), "stderr: {stderr}");
}

#[test]
fn import_segy_via_binary() {
    let dir = tempfile::tempdir().unwrap();
    // Build a small IEEE fixture through the library writer.
    let mut section = seistopo::grid::Section::zeros(16, 8, 0.002, 12.5);
    for (i, v) in section.samples.iter_mut().enumerate() {
        *v = (i as f64 * 0.17).sin();
    }
    let segy = dir.path().join("fixture.segy");
    seistopo::segy::write_segy_minimal(&section, &segy).unwrap();
    let grid = dir.path().join("imported.sgrd");
    let stdout = run_ok(&[
        "import-segy",
        "--input",
        segy.to_str().unwrap(),
        "--output",
        grid.to_str().unwrap(),
    ]);
    assert!(stdout.contains("format code 5"), "stdout: {stdout}");
    let imported = seistopo::io::read_grid(&grid).unwrap();
    assert_eq!((imported.nt, imported.nx), (16, 8));
    assert_eq!(imported.dt, 0.002);
    assert_eq!(imported.dx, 12.5);
}
