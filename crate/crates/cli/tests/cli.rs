use std::process::Command;

fn circlemap() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_circlemap"));
    c.env("CIRCLEMAP_JOBS", "1");
    c
}

#[test]
fn tongues_writes_one_record_per_rational() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.jsonl");
    let status = circlemap()
        .args(["tongues", "--l", "3", "--qmax", "3", "--tol", "1e-10", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let atlas = circlemap::TongueAtlas::from_jsonl(&text).unwrap();
    assert_eq!(atlas.len(), 5);
    assert!(atlas.records().iter().all(|r| r.locking.is_some()));
}

#[test]
fn scalings_table_shape() {
    let out = circlemap()
        .args(["scalings", "--nmax", "12"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "n,h_n,cubic_product,phase_sum,product");
    assert_eq!(body.len(), 1 + 25);
    assert!(text.lines().any(|l| l.starts_with("# fingerprint: ")));
    for row in &body[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 5);
        assert!(cells[1] > 0.0 && cells[1] < 1.0);
    }
}

#[test]
fn scalings_reuses_a_saved_atlas() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.jsonl");
    let ok = circlemap()
        .args(["tongues", "--depth", "1", "--cutoff", "5", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(ok.success());
    let out = circlemap()
        .args(["scalings", "--nmax", "5", "--format", "json", "--atlas"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);

    let missing = circlemap()
        .args(["scalings", "--nmax", "6", "--atlas"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn saddle_rows_follow_eps() {
    let out = circlemap()
        .args(["saddle", "--eps", "1e-3,1e-4", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1]["passage_length"].as_u64() > rows[0]["passage_length"].as_u64());
}

#[test]
fn farey_single_rational() {
    let out = circlemap()
        .args(["farey", "--rational", "3/8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("3/8,LRL,2,1/3,2/5,4/11,5/13"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["tongues", "--bogus"],
        vec!["farey", "--rational", "5/3"],
        vec!["tongues", "--qmax", "3", "--l", "4"],
        vec!["tongues", "--qmax", "3", "--family", "tent"],
        vec!["tongues"],
    ] {
        let out = circlemap().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn box_size_below_resolution_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.jsonl");
    assert!(circlemap()
        .args(["tongues", "--qmax", "8", "--out"])
        .arg(&path)
        .status()
        .unwrap()
        .success());
    let out = circlemap()
        .args(["dimension", "--qmax", "8", "--eps", "1e-9", "--atlas"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
