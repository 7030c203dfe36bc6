use std::fs;

use splitrec_cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["splitrec"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn slab_exact_prints_coefficients() {
    let (code, out, _) = call(&["slab-exact", "--eps2", "3+0.03i", "--xi1", "6.2831853", "--xi2", "69.115038"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["R"]["re"].as_f64().unwrap() + 0.3207).abs() < 1e-4);
    assert!((v["R"]["im"].as_f64().unwrap() + 0.0658).abs() < 1e-4);
    assert!((v["T"]["re"].as_f64().unwrap() + 0.2185).abs() < 1e-4);
    assert!((v["T"]["im"].as_f64().unwrap() - 0.4836).abs() < 1e-4);
}

#[test]
fn slab_smatrix_files_match_boundary_identity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, _, _) = call(&["slab-smatrix", "--defaults-paper", "--output", d]);
    assert_eq!(code, 0);
    let summary = json(&fs::read_to_string(dir.path().join("summary.json")).unwrap());
    let r = num_complex::Complex64::new(summary["R"]["re"].as_f64().unwrap(), summary["R"]["im"].as_f64().unwrap());
    let csv = fs::read_to_string(dir.path().join("field.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,re,im,abs,phase_rad"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert!((first[3] - (r + 1.0).norm()).abs() < 2e-3);
    assert_eq!(csv.lines().count(), 1201);
    assert!(!csv.contains('\r'));
    for name in ["y1.csv", "y2.csv"] {
        assert!(dir.path().join(name).exists());
    }
}

#[test]
fn json_format_writes_one_object() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, _, _) = call(&["cavity-backward", "--u1", "0.1", "--format", "json", "--output", d]);
    assert_eq!(code, 0);
    let v = json(&fs::read_to_string(dir.path().join("cavity-backward.json")).unwrap());
    assert_eq!(v["amplitude"]["value"].as_array().unwrap().len(), 100);
    assert_eq!(v["y2"]["k"][0], 1);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn cavity_design_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["cavity-design", "--u1", "0.03", "--phi", "2.0943951", "--q", "10000", "--cells", "100", "--output", d];
    assert_eq!(call(&args).0, 0);
    let csv = fs::read_to_string(dir.path().join("design.csv")).unwrap();
    assert!(csv.starts_with("k,g,u\n1,"));
    assert_eq!(csv.lines().count(), 101);
}

#[test]
fn lossless_chain_accepts_infinite_q() {
    let (code, out, _) = call(&["cavity-design", "--u1", "0.03", "--q", "inf", "--cells", "1"]);
    assert_eq!(code, 0);
    assert!((json(&out)["g1"].as_f64().unwrap() - 1.04072).abs() < 1e-5);
}

#[test]
fn ramp_reports_transfer_overflow() {
    let (code, out, _) = call(&["slab-ramp"]);
    assert_eq!(code, 0);
    assert!(json(&out)["t_overflow_at"].is_i64());
}

#[test]
fn exit_codes() {
    let (code, _, err) = call(&["slab-smatrix", "--h", "abc"]);
    assert_eq!(code, 2);
    assert!(err.contains("--h"));
    let (code, _, err) = call(&["slab-smatrix", "--eps2", "3 + 2i"]);
    assert_eq!(code, 2);
    assert!(err.contains("--eps2"));
    assert_eq!(call(&["nonsense"]).0, 2);
    assert_eq!(call(&["cavity-backward", "--u1", "0.1", "--ratio-exponent", "2"]).0, 2);

    let (code, _, err) = call(&["cavity-design", "--u1", "0.001", "--cells", "9"]);
    assert_eq!(code, 1);
    assert!(err.contains("cell 10"));
    assert_eq!(call(&["slab-smatrix", "--n1", "1300"]).0, 1);
    assert_eq!(call(&["slab-exact", "--xi1", "3", "--xi2", "1"]).0, 1);
}

#[test]
fn io_failure_names_the_path() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let p = file.path().join("sub");
    let (code, _, err) = call(&["slab-exact", "--output", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains(p.to_str().unwrap()));
}

#[test]
fn help_documents_every_figure() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    for n in 1..=14 {
        assert!(out.contains(&format!("Fig. {n} ")), "figure {n} missing");
    }
}

#[test]
fn selftest_passes() {
    let (code, out, _) = call(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("12 of 12 criteria passed"));
}
