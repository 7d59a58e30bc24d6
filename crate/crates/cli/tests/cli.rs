use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ptspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptspec")).args(args).output().expect("binary runs")
}

fn ptspec_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptspec"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn rect_spectrum_is_the_square_well() {
    let out = ptspec(&["spectrum", "--potential", "rect", "--v1", "20", "--v2", "0", "--a", "2", "--method", "analytic"]);
    let v = json_stdout(&out);
    let got = floats(&v["eigenvalues"]);
    let exact = ptspec::oracle::square_well_levels(20.0, 2.0);
    assert_eq!(got.len(), exact.len());
    for (a, b) in got.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-8, "{a} {b}");
    }
    assert_eq!(v["method"], "analytic");
    assert_eq!(v["manifest"]["command"], "spectrum");
    assert_eq!(v["manifest"]["spec"]["v1"], 20.0);
    assert!(v["manifest"]["timestamp"].is_null());
}

#[test]
fn spectrum_past_last_ep_is_empty() {
    let out = ptspec(&["spectrum", "--potential", "gaussian", "--v1", "50", "--v2", "70", "--method", "shooting"]);
    let v = json_stdout(&out);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 0);
}

#[test]
fn usage_errors_exit_two() {
    let mismatch = ptspec(&["spectrum", "--potential", "rect", "--v1", "20", "--v2", "3", "--method", "wc-pencil"]);
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("wc-pencil"));
    let unknown = ptspec(&["spectrum", "--potential", "lorentz", "--v1", "20", "--v2", "3", "--method", "shooting"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_scale = ptspec(&["spectrum", "--potential", "sech", "--v1", "5", "--v2", "0", "--method", "shooting", "--scale", "auto"]);
    assert_eq!(bad_scale.status.code(), Some(2));
    let threads = ptspec_env(&["validate", "--fast"], "PTSPEC_THREADS", "many");
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn unwritable_output_fails() {
    let out = ptspec(&[
        "sweep", "--potential", "rect", "--v1", "20", "--method", "analytic", "--v2-min", "0", "--v2-max", "1",
        "--out-csv", "/nonexistent-dir/c.csv", "--out-json", "/nonexistent-dir/c.json",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

fn rect_sweep(dir: &Path, method: &str, extra: &[&str]) -> (String, Value, String) {
    let csv = dir.join("curves.csv");
    let json = dir.join("eps.json");
    let svg = dir.join("plot.svg");
    let mut args = vec![
        "sweep", "--potential", "rect", "--v1", "20", "--a", "2", "--method", method, "--v2-min", "0", "--v2-max",
        "5", "--steps", "100", "--out-csv", path_str(&csv), "--out-json", path_str(&json), "--out-svg",
        path_str(&svg),
    ];
    args.extend_from_slice(extra);
    let out = ptspec(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    (std::fs::read_to_string(&csv).unwrap(), j, std::fs::read_to_string(&svg).unwrap())
}

#[test]
fn sweep_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, j1, s1) = rect_sweep(dir.path(), "analytic", &[]);
    let (c2, j2, s2) = rect_sweep(dir.path(), "analytic", &[]);
    assert_eq!(c1, c2);
    assert_eq!(serde_json::to_string(&j1).unwrap(), serde_json::to_string(&j2).unwrap());
    // the plots differ at most in the timestamp of the embedded manifest
    let strip = |s: &str| {
        let k = s.find("\"timestamp\":").unwrap();
        let end = k + s[k..].find(',').unwrap_or(s.len() - k);
        format!("{}{}", &s[..k], &s[end..])
    };
    assert_eq!(strip(&s1), strip(&s2));
    let (_, _, r1) = rect_sweep(dir.path(), "analytic", &["--reproducible"]);
    let (_, _, r2) = rect_sweep(dir.path(), "analytic", &["--reproducible"]);
    assert_eq!(r1, r2);
    assert!(r1.contains("\"timestamp\":null"));
    // thread count does not change the result
    let single = ptspec_env(
        &["eps", "--potential", "rect", "--v1", "20", "--method", "analytic", "--v2-min", "0", "--v2-max", "5", "--steps", "100"],
        "PTSPEC_THREADS",
        "1",
    );
    let single = json_stdout(&single);
    assert_eq!(single["eps"], j1["eps"]);
}

#[test]
fn sweep_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, json, _) = rect_sweep(dir.path(), "analytic", &[]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("v2,branch_label,energy"));
    let rows: Vec<(f64, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(rows.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
    assert!(rows.iter().all(|r| r.2 < 0.0 && r.2 > -20.0));
    assert_eq!(json["eps"].as_array().unwrap().len(), 3);
    for ep in json["eps"].as_array().unwrap() {
        assert_eq!(ep["branches"].as_array().unwrap().len(), 2);
        assert!(ep["v2c"].as_f64().unwrap() > 0.0);
    }
    assert_eq!(json["crossings"].as_array().unwrap().len(), 0);
    assert_eq!(json["manifest"]["sweep"]["steps"], 100);
}

#[test]
fn zero_length_range_gives_one_v2_value() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("z.csv");
    let json = dir.path().join("z.json");
    let out = ptspec(&[
        "sweep", "--potential", "rect", "--v1", "20", "--method", "analytic", "--v2-min", "0", "--v2-max", "0",
        "--out-csv", path_str(&csv), "--out-json", path_str(&json),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let v2s: std::collections::BTreeSet<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(v2s.len(), 1);
    assert_eq!(text.lines().count() - 1, ptspec::oracle::square_well_levels(20.0, 2.0).len());
}

#[test]
fn rect_methods_agree_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a, _) = rect_sweep(dir.path(), "analytic", &[]);
    let (_, s, _) = rect_sweep(dir.path(), "shooting", &[]);
    let ea: Vec<f64> = a["eps"].as_array().unwrap().iter().map(|e| e["v2c"].as_f64().unwrap()).collect();
    let es: Vec<f64> = s["eps"].as_array().unwrap().iter().map(|e| e["v2c"].as_f64().unwrap()).collect();
    assert_eq!(ea.len(), es.len());
    for (x, y) in ea.iter().zip(&es) {
        assert!((x - y).abs() <= 2e-3);
    }
}

#[test]
fn svg_has_fixed_viewport_and_markers() {
    let dir = tempfile::tempdir().unwrap();
    let (_, json, svg) = rect_sweep(dir.path(), "analytic", &["--reproducible"]);
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(r#"width="900" height="700""#));
    assert_eq!(svg.matches("class=\"ep\"").count(), json["eps"].as_array().unwrap().len());
    assert!(svg.matches("<polyline").count() >= 6);
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn crossings_command_reports_none_for_rect() {
    let out = ptspec(&[
        "crossings", "--potential", "rect", "--v1", "20", "--method", "analytic", "--v2-min", "0", "--v2-max", "5",
        "--steps", "100",
    ]);
    let v = json_stdout(&out);
    assert_eq!(v["crossings"].as_array().unwrap().len(), 0);
    assert_eq!(v["manifest"]["command"], "crossings");
}

#[test]
fn gaussian_eps_match_the_library() {
    let out = ptspec(&[
        "eps", "--potential", "gaussian", "--v1", "50", "--method", "ho-basis", "--v2-min", "0", "--v2-max", "80",
        "--steps", "200",
    ]);
    let v = json_stdout(&out);
    let cli: Vec<f64> = v["eps"].as_array().unwrap().iter().map(|e| e["v2c"].as_f64().unwrap()).collect();
    let run = ptspec::reproduce::run_figure(
        ptspec::reproduce::figures().iter().find(|f| f.id == "gaussian-ho-basis").unwrap(),
    )
    .unwrap();
    let lib = run.ep_values();
    assert_eq!(cli.len(), 3);
    assert_eq!(cli.len(), lib.len());
    for (a, b) in cli.iter().zip(&lib) {
        assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} {b}");
    }
    assert!(v["manifest"]["defaults"]["scale"].as_f64().unwrap() > 0.0);
}

#[test]
fn validate_fast_passes_and_catches_injected_fault() {
    let t = std::time::Instant::now();
    let ok = ptspec(&["validate", "--fast"]);
    let secs = t.elapsed().as_secs_f64();
    let text = String::from_utf8_lossy(&ok.stdout);
    assert_eq!(ok.status.code(), Some(0), "{text}");
    assert!(secs < 60.0, "{secs}");
    assert!(text.contains("matrix-elements"));

    let bad = ptspec(&["validate", "--fast", "--inject-fault", "gauss-element"]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("failed: matrix-elements"), "{err}");
    assert_eq!(err.lines().filter(|l| l.starts_with("failed:")).count(), 1);
}
