use std::f64::consts::{FRAC_PI_4, SQRT_2, TAU};
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn domain(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("domains");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn wavrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavrel")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn disk_light_points() {
    let out = wavrel(&["light-points", "--domain", &domain("disk.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "wavrel.report/v1");
    let pts = r["result"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 4);
    let mut ts: Vec<(f64, String)> =
        pts.iter().map(|p| (p["t"].as_f64().unwrap(), p["sign"].as_str().unwrap().to_string())).collect();
    ts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let expect = [(FRAC_PI_4, "minus"), (3.0 * FRAC_PI_4, "plus"), (5.0 * FRAC_PI_4, "minus"), (7.0 * FRAC_PI_4, "plus")];
    for ((t, s), (te, se)) in ts.iter().zip(expect) {
        assert!((t - te).abs() < 1e-9, "{t} vs {te}");
        assert_eq!(s, se);
    }
}

#[test]
fn annulus_defect() {
    let out = wavrel(&["verify", "--suite", "defect", "--domain", &domain("annulus.json"), "--K", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["defect"], 2);
    assert_eq!(r["pass"], true);
    assert!(r["suites"][0]["surrogate"].is_string());
}

#[test]
fn misner_defect_is_not_lagrangian() {
    let out = wavrel(&["verify", "--suite", "defect", "--domain", &domain("misner.json"), "--K", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["defect"], 34);
    assert_eq!(r["result"]["lagrangian"], false);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--suite", "isotropy", "--domain", &domain("blob.json"), "--K", "6", "--M", "512", "--seed", "7"];
    let a = wavrel(&args);
    let b = wavrel(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(report(&a)["seed"], 7);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"curves":[{"kind":"square","r":1}]}"#).unwrap();
    let out = wavrel(&["light-points", "--domain", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&bad, r#"{"metric":{"conformal":{"poly":[[-1.0]]}},"curves":[{"kind":"circle","r":1}]}"#).unwrap();
    let out = wavrel(&["light-points", "--domain", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Lorentzian"));
    assert_eq!(wavrel(&["verify", "--suite", "nonsense", "--domain", &domain("disk.json")]).status.code(), Some(2));
    assert_eq!(wavrel(&["diamond", "--hj", "--f", "exp"]).status.code(), Some(2));
}

#[test]
fn suite_failure_exits_one_with_report() {
    // A loose-enough tolerance passes, an impossible one fails.
    let ok = wavrel(&["diamond", "--hj", "--f", "sin:2", "--g", "poly:0,1,3"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = wavrel(&["diamond", "--hj", "--f", "sin:2", "--g", "poly:0,1,3", "--tol", "0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(report(&bad)["pass"], false);
}

#[test]
fn unit_diamond() {
    let out = wavrel(&["diamond", "--hj", "--f", "id", "--g", "id", "--box", "0", "1", "0", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["hj_vertex"].as_f64(), Some(-1.0));
    assert!((r["result"]["bulk"].as_f64().unwrap() + 1.0).abs() < 1e-10);
}

#[test]
fn involution_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("map.csv");
    let out = wavrel(&["involution", "--domain", &domain("disk.json"), "--sign", "minus", "--grid", "64", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("component,t,target_component,target_t,class_order"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[3].is_empty() {
            continue;
        }
        let (t, q): (f64, f64) = (cols[1].parse().unwrap(), cols[3].parse().unwrap());
        let want = (std::f64::consts::FRAC_PI_2 - t).rem_euclid(TAU);
        let d = (q - want).rem_euclid(TAU);
        assert!(d.min(TAU - d) < 1e-8, "{t} -> {q}");
    }
}

#[test]
fn flow_maps_to_inner_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("outer.csv"), dir.path().join("inner.csv"));
    let m = 512;
    let mut text = String::from("theta,phi,phi_n\n");
    for j in 0..m {
        let t = TAU * j as f64 / m as f64;
        let v = SQRT_2 * t.cos();
        text.push_str(&format!("{t},{v},{v}\n"));
    }
    std::fs::write(&input, text).unwrap();
    let out = wavrel(&["flow", "--xi", &2f64.ln().to_string(), "--in", input.to_str().unwrap(), "--out", output.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&output).unwrap();
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let t: f64 = rec[0].parse().unwrap();
        let exact = t.cos() / SQRT_2;
        assert!((rec[1].parse::<f64>().unwrap() - exact).abs() < 1e-6);
        assert!((rec[2].parse::<f64>().unwrap() - exact).abs() < 1e-6);
        n += 1;
    }
    assert_eq!(n, m);
}

#[test]
fn flow_composition() {
    let out = wavrel(&["flow", "--compose", "0.3", "0.4", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["composition_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn misner_traces() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("path.csv");
    let out = wavrel(&["misner", "--trace", "0.3", "--sign", "minus", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["outcome"], "asymptotic");
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("x,y\n0.3,-1\n"));
    let out = wavrel(&["misner", "--trace", "0.3", "--sign", "plus"]);
    assert_eq!(report(&out)["result"]["outcome"], "hit");
    let out = wavrel(&["misner", "--defect", "--K", "2", "--piece", "upper"]);
    assert_eq!(report(&out)["result"]["defect"], 4);
}

#[test]
fn disk_dirichlet_diagnosis() {
    let out = wavrel(&["dirichlet", "--domain", &domain("disk.json"), "--diagnose"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["kernel_found"], true);
    assert_eq!(r["result"]["verdict"], "no-uniqueness");
    assert!((r["result"]["rotation_number"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn csv_format_on_stdout() {
    let out = wavrel(&["light-points", "--domain", &domain("annulus.json"), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("component,t,sign,kappa"));
    assert_eq!(text.lines().count(), 9);
}
