use rdl::manifest::{sha256_hex, RunManifest};
use std::path::Path;
use std::process::{Command, Output};

fn rdl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdl")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["report", "--space", "nowhere"][..],
        &["simulate", "--paths", "1", "--threads", "0"],
        &["simulate", "--dt", "0.3", "--t-max", "1"],
        &["report", "--space", "h2", "--t-grid", "1,2"],
        &["report", "--space", "kaimanovich"],
        &["gromov", "--a", "missing.json", "--b", "missing.json"],
        &["kernel", "--space", "euclidean", "--dim", "0"],
    ] {
        let o = rdl(dir.path(), args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn triangle_violation_names_the_triple() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"n":3,"basepoint":0,"dist":[[0,1,5],[1,0,1],[5,1,0]]}"#).unwrap();
    std::fs::write(dir.path().join("pt.json"), r#"{"n":1,"basepoint":0,"dist":[[0]]}"#).unwrap();
    let o = rdl(dir.path(), &["gromov", "--a", "bad.json", "--b", "pt.json"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("triangle inequality") && err.contains("(0, 1, 2)"), "{err}");
}

#[test]
fn unconverged_grid_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["report", "--space", "hyperbolic", "--dim", "3", "--kappa", "2", "--t-grid", "0.01,0.02,0.04,0.08,0.16,0.32"];
    let o = rdl(dir.path(), &args);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
}

#[test]
fn witness_is_admissible_and_bracket_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.json"), r#"{"n":2,"basepoint":0,"dist":[[0,1],[1,0]]}"#).unwrap();
    std::fs::write(dir.path().join("b.json"), r#"{"n":2,"basepoint":0,"dist":[[0,1.2],[1.2,0]]}"#).unwrap();
    let o = rdl(dir.path(), &["gromov", "--a", "a.json", "--b", "b.json", "--witness", "w.json", "--out", "d.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let read = |n: &str| std::fs::read_to_string(dir.path().join(n)).unwrap();
    let a = rdl_gromov::PointedSpace::from_json(&read("a.json")).unwrap();
    let b = rdl_gromov::PointedSpace::from_json(&read("b.json")).unwrap();
    let w = rdl_gromov::Extension::from_json(&read("w.json")).unwrap();
    w.validate(&a, &b).unwrap();
    let d: serde_json::Value = serde_json::from_str(&read("d.json")).unwrap();
    let (lo, hi) = (d["lo"].as_f64().unwrap(), d["hi"].as_f64().unwrap());
    assert!(lo <= hi && hi - lo <= 1e-4 && (0.09..=0.11).contains(&hi), "[{lo}, {hi}]");
    w.covers(&a, &b, hi, 0.0).unwrap();
}

#[test]
fn reruns_are_byte_identical_and_manifests_match() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["simulate", "--space", "halfplane", "--paths", "20", "--t-max", "2", "--seed", "9", "--out", "p.csv"];
    for (d, threads) in [(&d1, "1"), (&d2, "3")] {
        let o = rdl(d.path(), &[&args[..], &["--threads", threads]].concat());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let bytes = |d: &tempfile::TempDir, n: &str| std::fs::read(d.path().join(n)).unwrap();
    let csv = bytes(&d1, "p.csv");
    assert_eq!(csv, bytes(&d2, "p.csv"));
    assert!(String::from_utf8_lossy(&csv).starts_with("path,t,x,y,d\n"));

    let m: RunManifest = serde_json::from_slice(&bytes(&d1, "p.csv.manifest.json")).unwrap();
    let m2: RunManifest = serde_json::from_slice(&bytes(&d2, "p.csv.manifest.json")).unwrap();
    assert_eq!(m.command, "simulate");
    assert_eq!(m.seed, Some(9));
    assert_eq!((m.threads, m2.threads), (Some(1), Some(3)));
    assert_eq!(m.outputs.len(), 1);
    assert_eq!(m.outputs[0].sha256, sha256_hex(&csv));
    assert_eq!(m.outputs, m2.outputs);
    assert_eq!(m.config, m2.config);

    let o = rdl(d1.path(), &["simulate", "--paths", "20", "--t-max", "2", "--seed", "10", "--out", "q.csv"]);
    assert_eq!(code(&o), 0);
    assert_ne!(bytes(&d1, "q.csv"), csv);
}

#[test]
fn report_json_goes_to_stdout_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let o = rdl(dir.path(), &["report", "--space", "euclidean", "--dim", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ell"]["value"].as_f64(), Some(0.0));
    assert!(stderr(&o).contains("converged"));
}

#[test]
fn kernel_table_is_decreasing_in_distance() {
    let dir = tempfile::tempdir().unwrap();
    let o = rdl(dir.path(), &["kernel", "--space", "h2", "--samples", "50"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,q"));
    let q: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(q.len(), 50);
    assert!(q.windows(2).all(|w| w[1] < w[0]));
}
