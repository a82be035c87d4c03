//! CLI I/O contracts: artifact round-trips, SVG well-formedness, exit
//! codes, and determinism.

use std::path::Path;
use std::process::Command;

use randers_cli::{run, Command as Cmd, PlanDoc, RunOpts, Scenario};

fn opts(dir: &Path) -> RunOpts {
    RunOpts {
        out_dir: dir.to_path_buf(),
        formats: None,
        tol: None,
        seed_angles: None,
    }
}

/// Tiny well-formedness check: every element closes in order.
fn assert_well_formed_xml(text: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        rest = &rest[open..];
        let close = rest.find('>').expect("unterminated tag");
        let tag = &rest[1..close];
        rest = &rest[close + 1..];
        if tag.starts_with('?') || tag.starts_with('!') {
            continue;
        }
        if let Some(name) = tag.strip_prefix('/') {
            let top = stack.pop().unwrap_or_else(|| panic!("stray closer {name}"));
            assert_eq!(top, name, "mismatched tag");
        } else if !tag.ends_with('/') {
            let name: String = tag.split_whitespace().next().unwrap().to_string();
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

#[test]
fn plan_json_roundtrips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Scenario::parse(
        r#"{"wind": {"kind": "scaled", "params": {"factor": 0.6, "inner": {"kind": "shear"}}},
            "plan": {"pattern": {"kind": {"type": "expanding_square", "legs": 6},
                                 "origin": [0.0, 0.0], "heading": 0.0, "spacing": 0.15},
                     "grid": 120}}"#,
    )
    .unwrap();
    let out = run(Cmd::Plan, &scenario, &opts(dir.path())).unwrap();
    assert!(out.files.iter().any(|f| f.ends_with("plan.json")));
    let text = std::fs::read_to_string(dir.path().join("plan.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let optimal: PlanDoc = serde_json::from_value(doc["optimal"].clone()).unwrap();
    // Re-serialize and re-parse: floats must survive bit-exactly.
    let reprinted = serde_json::to_string(&optimal).unwrap();
    let reparsed: PlanDoc = serde_json::from_str(&reprinted).unwrap();
    assert_eq!(optimal, reparsed);
    assert!(doc["saving"].as_f64().unwrap() > 0.0);
    assert!(doc["coverage"]["complete"].as_bool().unwrap());
}

#[test]
fn fan_svg_is_well_formed_with_one_path_per_geodesic() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Scenario::parse(
        r#"{"wind": {"kind": "shear"},
            "fan": {"start": [0.0, -0.5], "d_phi": 0.17453292519943295, "t_max": 5.0}}"#,
    )
    .unwrap();
    run(Cmd::Fan, &scenario, &opts(dir.path())).unwrap();
    let svg = std::fs::read_to_string(dir.path().join("fan.svg")).unwrap();
    assert_well_formed_xml(&svg);
    let geodesic_paths = svg.matches("class=\"q").count();
    assert_eq!(geodesic_paths, 36);
}

#[test]
fn deterministic_artifacts() {
    let scenario = Scenario::parse(
        r#"{"wind": {"kind": "quartic", "params": {"a": 0.8, "b": 1.0}},
            "fan": {"start": [0.0, -0.5], "d_phi": 0.3490658503988659, "t_max": 3.0}}"#,
    )
    .unwrap();
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    run(Cmd::Fan, &scenario, &opts(d1.path())).unwrap();
    run(Cmd::Fan, &scenario, &opts(d2.path())).unwrap();
    for name in ["fan.csv", "fan.svg"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} not deterministic");
    }
}

#[test]
fn metric_csv_has_versioned_header_and_zero_curvature_for_zero_wind() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = Scenario::parse(
        r#"{"wind": {"kind": "zero"},
            "metric": {"samples": [
                {"pos": [0.0, 0.0], "vel": [1.0, 0.0]},
                {"pos": [1.0, -0.5], "vel": [0.3, 0.4]}]}}"#,
    )
    .unwrap();
    run(Cmd::Metric, &scenario, &opts(dir.path())).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("metric.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# randers metric samples v1");
    assert_eq!(
        lines.next().unwrap(),
        "x,y,u,v,F,alpha,beta,g_uu,g_uv,g_vv,det_g,K,res1,res2"
    );
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 14);
        assert_eq!(cols[11].parse::<f64>().unwrap(), 0.0, "K must vanish");
    }
}

// Exit-code taxonomy via the real binary: 1 domain error, 2 numerical
// failure, 3 bad input.
#[test]
fn exit_codes_match_taxonomy() {
    let bin = env!("CARGO_BIN_EXE_randers");
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    // Convexity violation: geodesic start outside the shear strip.
    let s1 = write(
        "s1.json",
        r#"{"wind": {"kind": "shear"},
            "geodesic": {"start": [0.0, 1.5], "phi0": 0.0, "t_max": 1.0}}"#,
    );
    let out = Command::new(bin)
        .args(["geodesic", "--scenario"])
        .arg(&s1)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("machine-readable stderr");
    assert_eq!(err["error"]["kind"], "convexity_violation");

    // Numerical failure: a miss tolerance below integrator accuracy can
    // never be met, so every seed fails to converge.
    let s2 = write(
        "s2.json",
        r#"{"wind": {"kind": "shear"},
            "connect": {"from": [0.0, -0.5], "to": [2.0, 0.5], "pos_tol": 1e-15}}"#,
    );
    let out = Command::new(bin)
        .args(["connect", "--scenario"])
        .arg(&s2)
        .arg("--out")
        .arg(dir.path())
        .args(["--seed-angles", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "no_connection");

    // Bad input: unknown key in the scenario.
    let s3 = write(
        "s3.json",
        r#"{"wind": {"kind": "zero"}, "front": {"start": [0,0], "t": 1.0, "n": 8, "oops": 1}}"#,
    );
    let out = Command::new(bin)
        .args(["front", "--scenario"])
        .arg(&s3)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn check_reports_pass_lines() {
    let bin = env!("CARGO_BIN_EXE_randers");
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("check.json");
    std::fs::write(&p, r#"{"wind": {"kind": "gaussian", "params": {"a": 0.997, "b": 0.0, "c": 1.0}}, "check": {}}"#).unwrap();
    let out = Command::new(bin)
        .args(["check", "--scenario"])
        .arg(&p)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 7);
    assert!(!stdout.contains("FAIL"));
}
