mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::data_dir;
use multitile::io::{self, ResultRow};
use multitile::reconstruction::{forward_data, reconstruct_grid};
use multitile::system::ShiftSet;
use num_complex::Complex64;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multitile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn spec(name: &str) -> String {
    data_dir().join(name).to_string_lossy().into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn shipped_specs() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn pipeline_on_shipped_specs() {
    let dir = tempfile::tempdir().unwrap();
    for file in shipped_specs() {
        let f = path_str(&file);
        let samples = dir.path().join("samples.csv");
        let result = dir.path().join("result.csv");

        let o = run(&["check", "--domain", f]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        let o = run(&["shifts", "--domain", f]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        let o = run(&["synthesize", "--domain", f, "--grid", "6", "--out", path_str(&samples)]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        let o = run(&[
            "reconstruct",
            "--domain",
            f,
            "--samples",
            path_str(&samples),
            "--oracle",
            "--out",
            path_str(&result),
        ]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        let rows = io::read_results(&result).unwrap();
        let truth = io::read_results(&multitile::cli::truth_path(&samples)).unwrap();
        assert_eq!(rows.len(), truth.len());
        let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{f}: residual {worst}");
        for (r, t) in rows.iter().zip(&truth) {
            assert!((r.value - t.value).norm() <= 1e-9, "{f}");
            assert_eq!(r.y, t.y);
        }
        let o = run(&["verify", "--domain", f, "--radius", "2"]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
    }
}

#[test]
fn check_summary_line() {
    let o = run(&["check", "--domain", &spec("interval_0_2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("perfect, v=(1), q=(2), delta=diag(1/2)\n"));
    let o = run(&["check", "--domain", &spec("two_intervals.json"), "--q", "4"]);
    assert!(stdout(&o).starts_with("strong, v=(1), q=(4), delta=diag(1/4)\n"));
}

#[test]
fn collision_exits_two() {
    let o = run(&["check", "--domain", &spec("two_intervals.json"), "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("Collision"), "{err}");
    assert!(err.contains("z=0 and z=2"), "{err}");
    assert!(err.contains("mod 2"), "{err}");
    let o = run(&["reconstruct", "--domain", &spec("two_intervals.json"), "--q", "2", "--samples", "x.csv", "--out", "y.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_failure_exits_two() {
    let o = run(&["check", "--domain", &spec("two_intervals.json"), "--q-max", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NoPairFound"));
}

#[test]
fn malformed_specs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let overlap = dir.path().join("overlap.json");
    std::fs::write(
        &overlap,
        r#"{"dimension": 1, "lattice_basis": [[1]], "cells": [
            {"box": [[0, 0.75]], "offsets": [[0], [1]]},
            {"box": [[0.25, 1]], "offsets": [[0], [2]]}]}"#,
    )
    .unwrap();
    let o = run(&["check", "--domain", path_str(&overlap)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NotATiling"), "{}", stderr(&o));

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"dimension": 1, "lattice_basis": [[1]], "cells": [], "extra": 0}"#).unwrap();
    assert_eq!(run(&["check", "--domain", path_str(&unknown)]).status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(run(&["check", "--domain", path_str(&garbage)]).status.code(), Some(1));

    assert_eq!(run(&["check", "--domain", "/nonexistent/spec.json"]).status.code(), Some(1));
    assert_eq!(run(&["check", "--domain", &spec("three_tile_2d.json"), "--q", "1,2,3"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn non_uniform_index_sets_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mixed.json");
    std::fs::write(
        &file,
        r#"{"dimension": 2, "lattice_basis": [[1, 0], [0, 1]], "cells": [
            {"box": [[0, 0.5], [0, 1]], "offsets": [[0, 0], [1, 0]]},
            {"box": [[0.5, 1], [0, 1]], "offsets": [[0, 0], [0, 1]]}]}"#,
    )
    .unwrap();
    let f = path_str(&file);
    let o = run(&["verify", "--domain", f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NonUniformShifts"));

    // pointwise reconstruction still works cell by cell
    let samples = dir.path().join("s.csv");
    let out = dir.path().join("r.csv");
    assert_eq!(run(&["synthesize", "--domain", f, "--grid", "4", "--out", path_str(&samples)]).status.code(), Some(0));
    let o = run(&["reconstruct", "--domain", f, "--samples", path_str(&samples), "--oracle", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn seeds_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let f = spec("three_tile_2d.json");
    let mut contents = Vec::new();
    for (name, seed) in [("a.csv", "0"), ("b.csv", "0"), ("c.csv", "1")] {
        let p = dir.path().join(name);
        let o = run(&["synthesize", "--domain", &f, "--seed", seed, "--out", path_str(&p)]);
        assert_eq!(o.status.code(), Some(0));
        contents.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
    assert_ne!(contents[0], contents[2]);
    let default = dir.path().join("d.csv");
    run(&["synthesize", "--domain", &f, "--out", path_str(&default)]);
    assert_eq!(std::fs::read(&default).unwrap(), contents[0]);
}

#[test]
fn coefficient_mode_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let f = spec("interval_0_2.json");
    let samples = dir.path().join("s.csv");
    let out = dir.path().join("r.csv");
    let o = run(&[
        "synthesize", "--domain", &f, "--mode", "coeff", "--function", "exp:1,0@2.5", "--radius", "3",
        "--out", path_str(&samples),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["reconstruct", "--domain", &f, "--samples", path_str(&samples), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    for row in io::read_results(&out).unwrap() {
        let expected = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 2.5 * row.y[0]);
        assert!((row.value - expected).norm() < 1e-9);
        assert!(row.residual.is_nan());
    }
    let o = run(&["synthesize", "--domain", &f, "--function", "exp:1@2", "--out", path_str(&samples)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dual_on_orthogonal_domain_is_the_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&[
        "dual", "--domain", &spec("interval_0_2.json"), "--lambda", "-1", "--shift", "1", "--grid", "5",
        "--out", path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<ResultRow> = io::read_results(&out).unwrap();
    assert_eq!(rows.len(), 10);
    for row in rows {
        let expected = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * -0.5 * row.y[0]);
        assert!((row.value - expected).norm() < 1e-10);
    }
}

#[test]
fn bounds_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bounds.json");
    let o = run(&["bounds", "--domain", &spec("interval_0_2.json"), "--q", "4", "--out", path_str(&report)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let alpha = v["alpha"].as_f64().unwrap();
    let beta = v["beta"].as_f64().unwrap();
    assert!((alpha - (2.0 - 2f64.sqrt())).abs() < 1e-10);
    assert!((beta - (2.0 + 2f64.sqrt())).abs() < 1e-10);
}

#[test]
fn reports_are_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("check.json");
    run(&["check", "--domain", &spec("three_tile_2d.json"), "--out", path_str(&report)]);
    let text = std::fs::read_to_string(&report).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(io::canonical_json(&value), text);
    assert!(text.starts_with("{\"class\":\"strong\""));
}

#[test]
fn thread_setting() {
    let f = spec("interval_0_2.json");
    let ok = Command::new(env!("CARGO_BIN_EXE_multitile"))
        .args(["verify", "--domain", &f])
        .env("MULTITILE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_multitile"))
        .args(["verify", "--domain", &f])
        .env("MULTITILE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sidecar_order_is_respected() {
    let dir = tempfile::tempdir().unwrap();
    let domain = common::three_tile_2d();
    let shifts = ShiftSet::new(&domain, vec![0.5, 0.5], vec![0, 0]).unwrap();
    let points = domain.sample_grid(3);
    let values: Vec<Vec<Complex64>> = points
        .iter()
        .enumerate()
        .map(|(i, _)| (0..3).map(|r| Complex64::new(i as f64, r as f64)).collect())
        .collect();
    let mut data = forward_data(&domain, &shifts, &points, &values).unwrap();
    let mut meta = io::SamplesMeta::new(&shifts, &[1.0, 1.0], &[2, 2], data.provenance, 2);
    for cell in &mut meta.cells {
        cell.indices.reverse();
    }
    for s in &mut data.samples {
        s.values.reverse();
    }
    let path = dir.path().join("s.csv");
    io::write_samples(&path, &data, &meta).unwrap();
    let (back, _) = io::read_samples(&path, &domain, &shifts).unwrap();
    let out = reconstruct_grid(&domain, &shifts, &back, true).unwrap();
    for (p, v) in out.points.iter().zip(&values) {
        for (a, b) in p.values.iter().zip(v) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    meta.cells[0].indices[0] = vec![5, 5];
    io::write_samples(&path, &data, &meta).unwrap();
    assert!(io::read_samples(&path, &domain, &shifts).is_err());
}
