use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hardy_core::hardy_w::HardyWFunction;
use hardy_core::partitions::BasisKey;
use hardy_core::{FockVector, Pairing, TruncationSpec};

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hardy-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn weights_suite_passes_and_reports_c21() {
    let dir = scratch("weights");
    let out = hardy(&["run", "weights", "--out", arg(&dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS weights.C[2,1]"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("weights.json")).unwrap()).unwrap();
    let rows = report["tables"]["weights.weights"].as_array().unwrap();
    let c21 = rows.iter().find(|r| r["lambda"] == serde_json::json!([2, 1])).unwrap();
    assert_eq!(c21["C"], "1/4");
    assert!(fs::read_to_string(dir.join("weights.csv")).unwrap().starts_with("id,paper_ref,status,residual,tolerance\n"));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let (one, four) = (scratch("det1"), scratch("det4"));
    for (dir, workers) in [(&one, "1"), (&four, "4")] {
        let out = hardy(&["run", "all", "--trunc", "3,2", "--samples", "4096", "--workers", workers, "--out", arg(dir)]);
        // The product-law check fails by design, everything else passes.
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("failing cases: heisenberg.representation_homomorphism\n"), "{err}");
    }
    for file in ["all.json", "all.csv", "all_convergence.csv"] {
        assert_eq!(fs::read(one.join(file)).unwrap(), fs::read(four.join(file)).unwrap(), "{file}");
    }
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(one.join("all.json")).unwrap()).unwrap();
    assert!(report["config"].get("workers").is_none());
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn ftransform_writes_one_convergence_row_per_level() {
    let dir = scratch("ft");
    let out = hardy(&["run", "ftransform", "--levels", "1,2,4", "--samples", "4096", "--out", arg(&dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let csv = fs::read_to_string(dir.join("ftransform_convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("level,"));
    assert_eq!(lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect::<Vec<_>>(), ["1", "2", "4"]);
}

#[test]
fn config_files_are_read_and_bad_ones_exit_2() {
    let dir = scratch("cfg");
    let good = dir.join("good.cfg");
    fs::write(&good, "# small run\ntrunc = 4,2\nseed = 7   # fixed\n").unwrap();
    let out = hardy(&["--config", arg(&good), "run", "weights", "--out", arg(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("weights.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 7);
    assert_eq!(report["config"]["max_degree"], 4);

    for text in ["trunc = 4\n", "seed = minus one\n", "colour = blue\n", "just words\n"] {
        let bad = dir.join("bad.cfg");
        fs::write(&bad, text).unwrap();
        let out = hardy(&["--config", arg(&bad), "run", "weights", "--out", arg(&dir)]);
        assert_eq!(out.status.code(), Some(2), "{text:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    assert_eq!(hardy(&["run", "nonsense", "--out", arg(&dir)]).status.code(), Some(2));
}

#[test]
fn eval_uses_the_stored_pairing() {
    let dir = scratch("eval");
    let spec = TruncationSpec::new(2, 2).unwrap();
    let psi = FockVector::basis(spec, BasisKey::from_parts(&[1, 1], &[1, 2]).unwrap()).unwrap();
    let path = dir.join("f.json");
    fs::write(&path, HardyWFunction::new(psi, Pairing::H).to_json().to_string()).unwrap();
    let out = hardy(&["eval", "--function", arg(&path), "--x", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pairing"], "H");
    assert!((v["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v["value"][1].as_f64().unwrap(), 0.0);
}

#[test]
fn gw_table_compares_quadrature_with_closed_form() {
    let dir = scratch("gw");
    let spec = TruncationSpec::new(4, 2).unwrap();
    let path = dir.join("f.json");
    fs::write(&path, HardyWFunction::constant(spec, Pairing::Bargmann).to_json().to_string()).unwrap();
    for which in ["SHIFT", "MULT"] {
        let out = hardy(&["gw", "--function", arg(&path), "--a", "0.5,0:0.2", "--r", "0.1,1", "--which", which]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        for row in v["rows"].as_array().unwrap() {
            assert!(row["quadrature_vs_closed_form"].as_f64().unwrap() < 1e-8);
        }
    }
}

#[test]
fn dump_weights_lists_every_diagram() {
    let out = hardy(&["dump-weights", "--trunc", "4,1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,C,h_norm_sq,w_norm_sq,C_f64,h_norm_sq_f64,w_norm_sq_f64");
    // 1 + 1 + 2 + 3 + 5 partitions of 0..=4.
    assert_eq!(lines.len(), 1 + 12);
    let row = lines.iter().find(|l| l.starts_with("\"[2,1]\"")).unwrap();
    assert!(row.starts_with("\"[2,1]\",1/4,1/3,1/12,2.5e-1,"), "{row}");
}
