use std::process::{Command, Output};

fn aal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_b6_reports_balanced_not_skt() {
    let out = aal(&["check", "--catalog", "b6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["balanced"], true);
    assert_eq!(v["skt"], false);
    assert_eq!(v["kahler"], false);
    assert_eq!(v["obstruction_norm"], 0.0);
    assert_eq!(v["oracle_agrees"], true);
}

#[test]
fn check_from_file_matches_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b6.json");
    let out = aal(&["catalog", "construct", "b6", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let from_file = json(&aal(&["check", "-i", path.to_str().unwrap()]));
    let from_catalog = json(&aal(&["check", "--catalog", "b6"]));
    assert_eq!(from_file, from_catalog);
}

#[test]
fn malformed_input_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"structure_constants\": [[1, 2").unwrap();
    let out = aal(&["check", "-i", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(aal(&["check"]).status.code(), Some(2));
    assert_eq!(aal(&["check", "--catalog", "b7"]).status.code(), Some(2));
}

#[test]
fn nilpotent_balanced_flow_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flow.csv");
    let out = aal(&["flow", "balanced", "--catalog", "nilpotent", "--t-end", "10", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut last_t = 0.0;
    for line in lines {
        let row: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let t = row[col("t")];
        let c = (1.0 + 12.0 * t).powf(1.0 / 6.0);
        // The catalog structure is g = diag(1, 1, 1, 1, 2, 2) in the f-basis.
        let expected = [c, c, c, c, 2.0 / c, 2.0 / c];
        for (i, e) in expected.iter().enumerate() {
            let g = row[col(&format!("g{}_{}", i + 1, i + 1))];
            assert!((g - e).abs() <= 1e-6 * e, "t = {t}, g{0}{0} = {g}, expected {e}", i + 1);
        }
        last_t = t;
    }
    assert_eq!(last_t, 10.0);
}

#[test]
fn backward_blow_up_is_a_numerical_abort() {
    let out = aal(&["flow", "balanced", "--catalog", "nilpotent", "--t-end", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step size underflow"));
}

#[test]
fn bad_tolerance_is_a_validation_failure() {
    let out = aal(&["flow", "bracket", "--catalog", "nilpotent", "--rtol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn soliton_on_nilpotent_example() {
    let v = json(&aal(&["soliton", "--catalog", "nilpotent"]));
    assert_eq!(v["soliton"], true);
    let alpha = v["certificate"]["alpha"].as_f64().unwrap();
    assert!((alpha + 3.0).abs() < 1e-9);
    assert_eq!(v["certificate"]["kind"], "expanding");
}

#[test]
fn anomaly_flow_requires_closed_volume_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lck.json");
    std::fs::write(&path, r#"{"almost_abelian": {"n": 3, "a": 1.0, "v": [0,0,0,0], "A": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}}"#)
        .unwrap();
    let out = aal(&["flow", "anomaly", "-i", path.to_str().unwrap(), "--tau", "0", "--alpha-prime", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("closed (n,0)-form"));
}

#[test]
fn sampling_is_deterministic() {
    let a = aal(&["sample", "--class", "balanced", "--seed", "11"]);
    let b = aal(&["sample", "--class", "balanced", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let c = aal(&["sample", "--class", "balanced", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn flow_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let out = aal(&["sample", "--class", "balanced", "--seed", "5", "-o", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let run = || aal(&["flow", "bracket", "-i", input.to_str().unwrap(), "--t-end", "3"]).stdout;
    assert_eq!(run(), run());
}

#[test]
fn catalog_commands() {
    let out = aal(&["catalog", "list"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("b6"));
    assert_eq!(aal(&["catalog", "verify-table1"]).status.code(), Some(0));
    let scan = json(&aal(&["catalog", "lattice-scan", "b7", "--params", "r=1", "--kmax", "10000"]));
    assert_eq!(scan["hits"].as_array().unwrap().len(), 0);
    assert_eq!(aal(&["catalog", "construct", "nosuch"]).status.code(), Some(2));
}

#[test]
fn holonomy_and_curvature() {
    let v = json(&aal(&["holonomy", "--catalog", "b6", "--tau", "-1"]));
    assert_eq!(v["dimension"], 8);
    assert_eq!(v["su_contained"], true);
    let out = aal(&["curvature", "--catalog", "b6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Omega^"));
}
