use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vortex-ladder"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> (i32, String) {
    let o = bin().args(args).arg("--config").arg(cfg).arg("--out").arg(out).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn json_out(args: &[&str], cfg_json: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", cfg_json);
    let out = dir.path().join("o.json");
    let (code, err) = run(args, &cfg, &out);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap()
}

const OPEN2: &str = r#"{"ladder": {"n_cells": 2, "boundary": "open"},
    "couplings": {"preset": "homogeneous-xyz", "jx": 1, "jy": 1, "jz": 1}}"#;

#[test]
fn spectrum_counts() {
    let v = json_out(&["spectrum"], OPEN2);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 256);
    assert_eq!(v["method"], "dense");
    let cfg = OPEN2.replace("\"couplings\"", "\"method\": \"fermion\", \"couplings\"");
    let v = json_out(&["spectrum"], &cfg);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 8 * 16);
    let labels = v["labels"].as_object().unwrap();
    let distinct: std::collections::BTreeSet<String> = labels.values().map(|l| l.to_string()).collect();
    assert_eq!(distinct.len(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let big = write_config(
        dir.path(),
        "big.json",
        r#"{"ladder": {"n_cells": 30, "boundary": "open"}, "couplings": {"preset": "homogeneous-xyz", "jx": 1, "jy": 1, "jz": 1}}"#,
    );
    assert_eq!(run(&["spectrum"], &big, &out).0, 3);
    assert!(!out.exists(), "no partial output on failure");
    let bad = write_config(dir.path(), "bad.json", r#"{"ladder": {"n_cells": 2, "boundary": "open"}, "colour": 3}"#);
    let (code, err) = run(&["sweep"], &bad, &out);
    assert_eq!(code, 2);
    assert!(err.contains("colour"));
    let missing_seed =
        write_config(dir.path(), "seed.json", r#"{"ladder": {"n_cells": 2, "boundary": "open"}, "couplings": {"random": {"low": 0, "high": 2}}}"#);
    assert_eq!(run(&["spectrum"], &missing_seed, &out).0, 2);
    let noconv = write_config(
        dir.path(),
        "it.json",
        r#"{"ladder": {"n_cells": 2, "boundary": "open"}, "seed": 1, "method": "spin-iterative", "k": 64,
            "couplings": {"preset": "homogeneous-xyz", "jx": 1, "jy": 1, "jz": 1}}"#,
    );
    let code = run(&["spectrum"], &noconv, &out).0;
    assert!(code == 0 || code == 4, "iterative run exits 0 or 4, got {code}");
}

#[test]
fn sweep_vortex_free_and_flipped_plaquette() {
    let cfg = r#"{"ladder": {"n_cells": 4, "boundary": "closed"}, "couplings": {"preset": "homogeneous-xyz", "jx": 1, "jy": 1, "jz": 1}}"#;
    let v = json_out(&["sweep", "--format", "json"], cfg);
    assert_eq!(v["argmin"], serde_json::json!([0]));
    assert_eq!(v["degenerate"], false);
    assert_eq!(v["reflections"].as_array().unwrap().len(), 2);

    // Three negative couplings on p1 only.
    let mut bonds = Vec::new();
    let sites = [(1, 2), (2, 3), (3, 4), (1, 4), (3, 6), (4, 5), (5, 6), (6, 7), (5, 8), (7, 8), (7, 10), (8, 9), (9, 10), (10, 11), (9, 12), (11, 12)];
    for (i, j) in sites {
        let jv = if [(1, 2), (2, 3), (1, 4)].contains(&(i, j)) { -1.0 } else { 1.0 };
        bonds.push(format!("[{i},{j},{jv}]"));
    }
    let cfg = format!(r#"{{"ladder": {{"n_cells": 3, "boundary": "open"}}, "couplings": {{"bonds": [{}]}}}}"#, bonds.join(","));
    let v = json_out(&["sweep", "--format", "json"], &cfg);
    let argmin = v["argmin"].as_array().unwrap();
    assert_eq!(argmin.len(), 1);
    let row = v["rows"].as_array().unwrap().iter().find(|r| r["sector_id"] == argmin[0]).unwrap();
    assert_eq!(row["values"], serde_json::json!([-1, 1, 1, 1, 1]));

    let zero = r#"{"ladder": {"n_cells": 2, "boundary": "open"}, "couplings": {"preset": "homogeneous-xyz", "jx": 0, "jy": 0, "jz": 0}}"#;
    let v = json_out(&["sweep", "--format", "json"], zero);
    assert_eq!(v["degenerate"], true);
    assert_eq!(v["argmin"].as_array().unwrap().len(), 8);
}

#[test]
fn sweep_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", OPEN2);
    let out = dir.path().join("o.csv");
    assert_eq!(run(&["sweep"], &cfg, &out).0, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "kind,sector_id,p1,p2,p3,ground_energy,note");
    assert!(text.contains("\nargmin,0,+1,+1,+1,"));
    assert!(text.contains("horizontal:symmetric"));
    assert!(!text.contains('\r'));
}

#[test]
fn gap_scan_decay_and_pairs() {
    let cfg = r#"{"ladder": {"n_cells": 4, "boundary": "closed"}, "n_range": [4, 12],
        "couplings": {"preset": "homogeneous-xyz", "jx": 1, "jy": 0.2, "jz": 2}}"#;
    let v = json_out(&["gap-scan", "--format", "json"], cfg);
    assert_eq!(v["rows"].as_array().unwrap().len(), 9 * 3);
    assert_eq!(v["summary"]["strictly_decreasing"], true);
    assert!(v["summary"]["slope"].as_f64().unwrap() < 0.0);

    let cfg = r#"{"ladder": {"n_cells": 4, "boundary": "open"}, "n_range": [6, 6], "patterns": ["vf", "p4", "p5", "p4+p5"],
        "couplings": {"preset": "decaying-top-open", "jx": 1, "jy": 1, "jz": 1}}"#;
    let v = json_out(&["gap-scan", "--format", "json"], cfg);
    let g: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["delta_e"].as_f64().unwrap()).collect();
    assert_eq!(g[0], 0.0);
    let ratio = g[3] / (g[1] + g[2]);
    assert!((ratio - 1.0).abs() < 0.2, "pair over sum of singles {ratio}");
}

#[test]
fn compare_open_and_closed() {
    let open = r#"{"ladder": {"n_cells": 2, "boundary": "open"}, "seed": 11, "couplings": {"random": {"low": 0.1, "high": 2}}}"#;
    let v = json_out(&["compare"], open);
    assert_eq!(v["spectra_equal"], true);
    assert!(v["only_spin"].as_array().unwrap().is_empty() && v["only_fermion"].as_array().unwrap().is_empty());
    let closed = r#"{"ladder": {"n_cells": 2, "boundary": "closed"}, "couplings": {"preset": "decaying-top-closed", "jx": 1, "jy": 0.2, "jz": 2}}"#;
    let v = json_out(&["compare"], closed);
    assert_eq!(v["spectra_equal"], false);
    assert!(v["ground_delta"].as_f64().unwrap().abs() <= 1e-8);
}

#[test]
fn perturb_zero_and_scaling() {
    let v = json_out(&["perturb"], r#"{"ladder": {"n_cells": 3, "boundary": "open"}, "perturbation": {"jx": 1, "t": 0}}"#);
    for r in v["rows"].as_array().unwrap() {
        assert_eq!(r["delta_e_formula"], 0.0);
        assert!(r["delta_e_exact"].as_f64().unwrap().abs() < 1e-12);
    }
    let v = json_out(&["perturb"], r#"{"ladder": {"n_cells": 3, "boundary": "open"}, "perturbation": {"jx": 1, "t": 0.02}}"#);
    assert_eq!(v["ground_vortex_free"], true);
    assert_eq!(v["scaling"].as_array().unwrap().len(), 5);
    assert!(v["scaling"].as_array().unwrap().iter().all(|s| s["error_shrinks_faster_than_cubic"] == true));
}

#[test]
fn rp_verify_pass_and_probe() {
    let cfg = r#"{"ladder": {"n_cells": 2, "boundary": "open"}, "seed": 9, "couplings": {"random": {"low": -2, "high": 2}}}"#;
    let v = json_out(&["rp-verify"], cfg);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["samples"], 200);
    assert!(v["min_functional"].as_f64().unwrap() >= -1e-10);
    let probe = cfg.replace("\"seed\"", "\"probe\": true, \"seed\"");
    let v = json_out(&["rp-verify"], &probe);
    assert!(v["verdict"] == "pass" || v["verdict"] == "inconclusive");
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"ladder": {"n_cells": 2, "boundary": "closed"}, "seed": 5, "couplings": {"random": {"low": -1, "high": 2}}}"#,
    );
    for cmd in ["sweep", "rp-verify", "compare"] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        assert_eq!(run(&[cmd], &cfg, &a).0, 0);
        let o = bin().args([cmd, "--threads", "1", "--config"]).arg(&cfg).arg("--out").arg(&b).output().unwrap();
        assert!(o.status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cmd}");
    }
}
